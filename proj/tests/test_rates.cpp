#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include "cvrelay/attack.hpp"
#include "cvrelay/covariance.hpp"
#include "cvrelay/rate.hpp"
#include "doctest.h"
#include "oracle/reference_rates.hpp"

using namespace cvrelay;

namespace {

RateConfig asymptotic_unit() { return RateConfig{}; }

RateConfig finite_cfg(double mu, double beta = 1.0) {
  RateConfig cfg;
  cfg.mu = mu;
  cfg.beta = beta;
  return cfg;
}

AttackParams named_params(const char* name, double tau, double omega, double eta = 1.0,
                          double etap = 1.0) {
  const auto [g, gp] = named_attack(attack_kind_from_name(name), omega);
  return AttackParams{tau, omega, g, gp, eta, etap};
}

// Uniformly samples a valid correlation pair for the given omega.
std::pair<double, double> random_valid_gg(std::mt19937_64& rng, double omega) {
  std::uniform_real_distribution<double> u(-omega, omega);
  for (;;) {
    const double g = u(rng);
    const double gp = u(rng);
    if (validate(omega, g, gp)) return {g, gp};
  }
}

}  // namespace

TEST_CASE("asymptotic rates match the frozen high-precision table") {
  for (const testref::AsymptoticRateRef& ref : testref::kAsymptoticRates) {
    const AttackParams p = named_params(ref.attack, ref.tau, ref.omega);
    const RateBreakdown b = key_rate(p, asymptotic_unit());
    CAPTURE(ref.tau);
    CAPTURE(ref.omega);
    CAPTURE(ref.attack);
    CHECK(std::abs(b.noise.lambda - ref.lambda) <= 1e-12);
    CHECK(std::abs(b.noise.lambda_p - ref.lambda_p) <= 1e-12);
    CHECK(std::abs(b.rate - ref.rate) <= 1e-10);
  }
}

TEST_CASE("closed-form helpers agree with the pipeline") {
  CHECK(std::abs(key_rate(named_params("collective", 0.9, 1.0), asymptotic_unit()).rate -
                 testref::kRatePureLoss09) <= 1e-12);
  CHECK(std::abs(rate_collective_closed(0.9, 1.0) - testref::kRatePureLoss09) <= 1e-12);
  CHECK(std::abs(rate_min_closed(0.9, 2.0) - testref::kRateMin09w2) <= 1e-12);
  for (double tau : {0.5, 0.7, 0.9}) {
    for (double omega : {1.0, 1.5, 2.0, 3.0}) {
      const double via_pipeline =
          key_rate(named_params("epr-negative", tau, omega), asymptotic_unit()).rate;
      CHECK(std::abs(via_pipeline - rate_min_closed(tau, omega)) <= 1e-11);
      const double coll =
          key_rate(named_params("collective", tau, omega), asymptotic_unit()).rate;
      CHECK(std::abs(coll - rate_collective_closed(tau, omega)) <= 1e-11);
    }
  }
}

TEST_CASE("asymptotic information terms at the reference modulation") {
  const RateBreakdown pure = key_rate(named_params("collective", 0.9, 1.0), asymptotic_unit());
  CHECK(std::abs(pure.i_e - testref::kHolevoAsy09w1Mu1e6) <= 1e-10);
  const RateBreakdown coll2 = key_rate(named_params("collective", 0.9, 2.0), asymptotic_unit());
  CHECK(std::abs(coll2.i_ab - testref::kMiAsy09w2Mu1e6) <= 1e-10);
  CHECK(std::abs(coll2.rate - (coll2.i_ab - coll2.i_e)) <= 1e-12);
}

TEST_CASE("finite-modulation information terms match the oracle") {
  const AttackParams coll = named_params("collective", 0.9, 1.5);
  CHECK(std::abs(mutual_information(coll, finite_cfg(100.0)) - testref::kMiFiniteMu100w15Coll) <=
        1e-12);
  CHECK(std::abs(holevo_information(coll, finite_cfg(100.0)) - testref::kHolevoFiniteMu100w15Coll) <=
        1e-12);
  const AttackParams epr = named_params("epr-negative", 0.9, 1.5);
  CHECK(std::abs(mutual_information(epr, finite_cfg(100.0)) - testref::kMiFiniteMu100w15EprNeg) <=
        1e-12);
  CHECK(std::abs(holevo_information(epr, finite_cfg(100.0)) - testref::kHolevoFiniteMu100w15EprNeg) <=
        1e-12);
  const AttackParams realistic = named_params("epr-negative", 0.9, 1.05, 0.98, 0.98);
  CHECK(std::abs(key_rate(realistic, finite_cfg(70.0, 0.95)).rate - testref::kRateRealisticMu70) <=
        1e-12);
}

TEST_CASE("finite-modulation rate converges to the asymptotic closed form") {
  for (const testref::AsymptoticRateRef& ref : testref::kAsymptoticRates) {
    const AttackParams p = named_params(ref.attack, ref.tau, ref.omega);
    const double r = key_rate(p, finite_cfg(1e6)).rate;
    CAPTURE(ref.tau);
    CAPTURE(ref.omega);
    CAPTURE(ref.attack);
    CHECK(std::abs(r - ref.rate) <= 1e-3);
  }
}

TEST_CASE("block assembly route reproduces the direct conditional state") {
  std::mt19937_64 rng(20260822);
  std::uniform_real_distribution<double> u_tau(0.05, 1.0);
  std::uniform_real_distribution<double> u_omega(1.05, 4.0);
  std::uniform_real_distribution<double> u_eta(0.5, 1.0);
  std::uniform_real_distribution<double> u_mu(1.0 + 1e-3, 200.0);
  int worst_exceeded = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    AttackParams p;
    p.tau = u_tau(rng);
    p.omega = u_omega(rng);
    std::tie(p.g, p.gp) = random_valid_gg(rng, p.omega);
    p.eta = draw % 3 == 0 ? 1.0 : u_eta(rng);
    p.etap = draw % 3 == 0 ? 1.0 : u_eta(rng);
    const double mu = u_mu(rng);
    const CovarianceMatrix direct = post_relay_cm(mu, p);
    const CovarianceMatrix blocks = bell_condition_blocks(mu, p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (std::abs(direct.at(i, j) - blocks.at(i, j)) > 1e-10) ++worst_exceeded;
  }
  CHECK(worst_exceeded == 0);
}

TEST_CASE("post-relay covariance structure") {
  const AttackParams p = named_params("epr-negative", 0.9, 1.5);
  const double mu = 40.0;
  const CovarianceMatrix v = post_relay_cm(mu, p);
  // Alice and Bob see identical marginals; q correlations are positive,
  // p correlations negative; q-p cross terms vanish.
  CHECK(v.at(0, 0) == doctest::Approx(v.at(2, 2)).epsilon(1e-14));
  CHECK(v.at(1, 1) == doctest::Approx(v.at(3, 3)).epsilon(1e-14));
  CHECK(v.at(0, 2) > 0.0);
  CHECK(v.at(1, 3) < 0.0);
  CHECK(v.at(0, 1) == 0.0);
  CHECK(v.at(0, 3) == 0.0);
  CHECK(v.at(1, 2) == 0.0);
  CHECK(is_physical(v));
}

TEST_CASE("reported spectra agree with the generic symplectic machinery") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u_tau(0.2, 1.0);
  std::uniform_real_distribution<double> u_omega(1.05, 3.0);
  std::uniform_real_distribution<double> u_mu(1.5, 500.0);
  for (int draw = 0; draw < 50; ++draw) {
    AttackParams p;
    p.tau = u_tau(rng);
    p.omega = u_omega(rng);
    std::tie(p.g, p.gp) = random_valid_gg(rng, p.omega);
    const double mu = u_mu(rng);
    const RateBreakdown b = key_rate(p, finite_cfg(mu));
    const SymplecticSpectrum joint = symplectic_spectrum(post_relay_cm(mu, p));
    const double hi = std::max(b.nu1, b.nu2);
    const double lo = std::min(b.nu1, b.nu2);
    CHECK(joint.values[0] == doctest::Approx(hi).epsilon(1e-9));
    CHECK(joint.values[1] == doctest::Approx(lo).epsilon(1e-9));
    const CovarianceMatrix bob = bob_conditional_cm(mu, p);
    const SymplecticSpectrum cond = symplectic_spectrum(bob);
    CHECK(cond.values[0] == doctest::Approx(b.nu_cond).epsilon(1e-9));
    // Holevo term decomposes over the reported spectra.
    const double holevo = entropy_h(b.nu1) + entropy_h(b.nu2) - entropy_h(b.nu_cond);
    CHECK(b.i_e == doctest::Approx(holevo).epsilon(1e-10));
  }
}

TEST_CASE("rate is symmetric under exchanging the quadrature noises") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u_tau(0.2, 1.0);
  std::uniform_real_distribution<double> u_omega(1.05, 3.0);
  for (int draw = 0; draw < 200; ++draw) {
    const double tau = u_tau(rng);
    const double omega = u_omega(rng);
    const auto [g, gp] = random_valid_gg(rng, omega);
    const AttackParams a{tau, omega, g, gp, 1.0, 1.0};
    // (g, gp) -> (-gp, -g) swaps lambda and lambda_p.
    const AttackParams b{tau, omega, -gp, -g, 1.0, 1.0};
    const RateBreakdown ra = key_rate(a, asymptotic_unit());
    const RateBreakdown rb = key_rate(b, asymptotic_unit());
    CHECK(ra.noise.lambda == doctest::Approx(rb.noise.lambda_p).epsilon(1e-13));
    CHECK(ra.noise.lambda_p == doctest::Approx(rb.noise.lambda).epsilon(1e-13));
    CHECK(ra.rate == doctest::Approx(rb.rate).epsilon(1e-12));
    CHECK(key_rate(a, finite_cfg(60.0)).rate ==
          doctest::Approx(key_rate(b, finite_cfg(60.0)).rate).epsilon(1e-12));
  }
}

TEST_CASE("rate improves with detector efficiency and reconciliation") {
  const double etas[] = {0.5, 0.7, 0.9, 1.0};
  double prev = -1e9;
  for (double eta : etas) {
    const AttackParams p = named_params("collective", 0.9, 1.2, eta, eta);
    const double r = key_rate(p, finite_cfg(50.0, 0.95)).rate;
    CHECK(r > prev);
    prev = r;
  }
  const AttackParams p = named_params("collective", 0.9, 1.2);
  CHECK(key_rate(p, finite_cfg(50.0, 0.9)).rate < key_rate(p, finite_cfg(50.0, 1.0)).rate);
}

TEST_CASE("eve decouples on a lossless channel") {
  const AttackParams p = named_params("collective", 1.0, 1.0);
  const RateBreakdown b = key_rate(p, finite_cfg(100.0, 0.9));
  CHECK(b.eve_decoupled);
  CHECK(b.i_e == 0.0);
  CHECK(b.rate == doctest::Approx(0.9 * b.i_ab).epsilon(1e-14));
  const RateBreakdown asy = key_rate(p, asymptotic_unit());
  CHECK(asy.eve_decoupled);
  CHECK(asy.i_e == 0.0);
}

TEST_CASE("asymptotic breakdown is insensitive to the reference modulation") {
  AttackParams p = named_params("epr-negative", 0.9, 2.0);
  RateConfig a;
  a.reference_mu = 1e6;
  RateConfig b;
  b.reference_mu = 1e8;
  CHECK(key_rate(p, a).rate == doctest::Approx(key_rate(p, b).rate).epsilon(1e-10));
}

TEST_CASE("configuration validation") {
  RateConfig cfg;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg.beta = 1.5;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg.beta = 1.0;
  cfg.mu = 1.0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg.mu = 0.5;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg.mu = 2.0;
  CHECK_NOTHROW(check_config(cfg));
  CHECK_THROWS_AS(post_relay_cm(0.999, named_params("collective", 0.9, 1.0)),
                  std::invalid_argument);
  // The vacuum boundary itself is a valid degenerate state: identity output.
  const CovarianceMatrix vac = post_relay_cm(1.0, named_params("collective", 0.9, 1.5));
  for (int i = 0; i < 4; ++i) CHECK(vac.at(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vac.at(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
}
