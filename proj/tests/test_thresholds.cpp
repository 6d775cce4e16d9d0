#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cvrelay/attack.hpp"
#include "cvrelay/rate.hpp"
#include "cvrelay/threshold.hpp"
#include "doctest.h"

using namespace cvrelay;

namespace {

double rate_of(AttackKind kind, double tau, double omega, const RateConfig& cfg,
               double eta = 1.0, double etap = 1.0) {
  const auto [g, gp] = named_attack(kind, omega);
  return key_rate(AttackParams{tau, omega, g, gp, eta, etap}, cfg).rate;
}

}  // namespace

TEST_CASE("roots are genuine zeros with the documented sign pattern") {
  const RateConfig cfg;
  for (AttackKind kind : {AttackKind::collective, AttackKind::epr_negative,
                          AttackKind::sep_plus}) {
    const ThresholdPoint point = threshold_omega(0.9, kind, cfg);
    REQUIRE(point.roots.size() == 1);
    const ThresholdRoot& root = point.roots.front();
    CHECK(std::abs(rate_of(kind, 0.9, root.omega, cfg)) <= 1e-6);
    CHECK(root.sign_below == 1);
    CHECK(root.sign_above == -1);
    CHECK(rate_of(kind, 0.9, root.omega - 1e-4, cfg) > 0.0);
    CHECK(rate_of(kind, 0.9, root.omega + 1e-4, cfg) < 0.0);
  }
}

TEST_CASE("the negative EPR attack has the tightest threshold at tau = 0.9") {
  const RateConfig cfg;
  const ThresholdPoint coll = threshold_omega(0.9, AttackKind::collective, cfg);
  const ThresholdPoint epr = threshold_omega(0.9, AttackKind::epr_negative, cfg);
  REQUIRE(coll.roots.size() == 1);
  REQUIRE(epr.roots.size() == 1);
  CHECK(epr.roots.front().omega < coll.roots.front().omega);
}

TEST_CASE("positive EPR attack: no root at tau = 0.9, inverted root at tau = 0.8") {
  const RateConfig cfg;
  const ThresholdPoint high = threshold_omega(0.9, AttackKind::epr_positive, cfg);
  CHECK(high.roots.empty());
  CHECK(high.constant_sign == 1);

  const ThresholdPoint low = threshold_omega(0.8, AttackKind::epr_positive, cfg);
  REQUIRE(low.roots.size() == 1);
  CHECK(low.roots.front().sign_below == -1);
  CHECK(low.roots.front().sign_above == 1);
  CHECK(rate_of(AttackKind::epr_positive, 0.8, low.roots.front().omega + 1e-3, cfg) > 0.0);
}

TEST_CASE("lossless channel is secure for every scanned omega") {
  const ThresholdPoint point = threshold_omega(1.0, AttackKind::collective, RateConfig{});
  CHECK(point.roots.empty());
  CHECK(point.constant_sign == 1);
  CHECK(point.distance_km == 0.0);
}

TEST_CASE("distance conversions round-trip") {
  for (double tau : {1.0, 0.954, 0.9, 0.5, 0.1, 1e-3}) {
    CHECK(std::abs(tau_from_distance(distance_from_tau(tau)) - tau) <= 1e-10 * tau + 1e-14);
  }
  for (double d : {0.0, 1.0, 2.5, 10.0, 40.0}) {
    CHECK(std::abs(distance_from_tau(tau_from_distance(d)) - d) <= 1e-10);
  }
  CHECK(tau_from_distance(50.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(tau_from_distance(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(distance_from_tau(0.0), std::invalid_argument);
  CHECK_THROWS_AS(distance_from_tau(1.1), std::invalid_argument);
}

TEST_CASE("roots are stable against the coarse scan resolution") {
  const RateConfig cfg;
  for (AttackKind kind : {AttackKind::collective, AttackKind::epr_negative}) {
    for (double tau : {0.85, 0.9, 0.95}) {
      const ThresholdPoint a = threshold_omega(tau, kind, cfg, 1.0, 1.0, 10.0, 400);
      const ThresholdPoint b = threshold_omega(tau, kind, cfg, 1.0, 1.0, 10.0, 800);
      REQUIRE(a.roots.size() == b.roots.size());
      for (std::size_t i = 0; i < a.roots.size(); ++i)
        CHECK(std::abs(a.roots[i].omega - b.roots[i].omega) <= 1e-6);
    }
  }
}

TEST_CASE("threshold curves are deterministic and ordered") {
  std::vector<double> taus;
  for (int i = 0; i <= 10; ++i) taus.push_back(0.85 + 0.01 * i);
  const RateConfig cfg;
  const auto curve1 = threshold_curve(AttackKind::collective, cfg, taus);
  const auto curve2 = threshold_curve(AttackKind::collective, cfg, taus);
  REQUIRE(curve1.size() == taus.size());
  for (std::size_t i = 0; i < curve1.size(); ++i) {
    CHECK(curve1[i].tau == taus[i]);
    REQUIRE(curve1[i].roots.size() == curve2[i].roots.size());
    for (std::size_t r = 0; r < curve1[i].roots.size(); ++r)
      CHECK(curve1[i].roots[r].omega == curve2[i].roots[r].omega);
  }
  // Less loss tolerates more excess noise: root omega grows with tau.
  for (std::size_t i = 1; i < curve1.size(); ++i) {
    REQUIRE(curve1[i].roots.size() == 1);
    CHECK(curve1[i].roots.front().omega > curve1[i - 1].roots.front().omega);
  }
}

TEST_CASE("realistic regime keeps the two-mode threshold below the one-mode one") {
  RateConfig cfg;
  cfg.mu = 10.0;
  cfg.beta = 0.95;
  int compared = 0;
  for (double d : {0.5, 1.0, 1.5, 2.0}) {
    const double tau = tau_from_distance(d);
    const ThresholdPoint coll =
        threshold_omega(tau, AttackKind::collective, cfg, 0.98, 0.98);
    const ThresholdPoint epr =
        threshold_omega(tau, AttackKind::epr_negative, cfg, 0.98, 0.98);
    if (coll.roots.empty() || epr.roots.empty()) continue;
    ++compared;
    CHECK(epr.roots.front().omega <= coll.roots.front().omega + 1e-9);
  }
  CHECK(compared >= 2);
}

TEST_CASE("optimal modulation at the documented working point") {
  std::vector<double> grid;
  for (int mu = 10; mu <= 1000; mu += 10) grid.push_back(mu);
  const OptimalModulation best = optimal_modulation(
      0.9, 1.05, AttackKind::epr_negative, 0.95, 0.98, 0.98, grid);
  CHECK(best.mu_star >= 20.0);
  CHECK(best.mu_star <= 100.0);
  CHECK(best.rates[6] > best.rates[99]);  // mu = 70 beats mu = 1000
  CHECK(best.rate_star >= best.rates[6]);
}

TEST_CASE("optimal modulation rejects malformed grids") {
  CHECK_THROWS_AS(optimal_modulation(0.9, 1.05, AttackKind::collective, 1.0, 1.0, 1.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      optimal_modulation(0.9, 1.05, AttackKind::collective, 1.0, 1.0, 1.0, {50.0, 20.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      optimal_modulation(0.9, 1.05, AttackKind::collective, 1.0, 1.0, 1.0, {0.5, 20.0}),
      std::invalid_argument);
}

TEST_CASE("solver input validation") {
  const RateConfig cfg;
  CHECK_THROWS_AS(threshold_omega(0.0, AttackKind::collective, cfg), std::invalid_argument);
  CHECK_THROWS_AS(threshold_omega(1.5, AttackKind::collective, cfg), std::invalid_argument);
  CHECK_THROWS_AS(threshold_omega(0.9, AttackKind::collective, cfg, 1.0, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(threshold_omega(0.9, AttackKind::collective, cfg, 1.0, 1.0, 10.0, 1),
                  std::invalid_argument);
}
