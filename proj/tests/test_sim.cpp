#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvrelay/attack.hpp"
#include "cvrelay/rate.hpp"
#include "cvrelay/sim.hpp"
#include "doctest.h"

using namespace cvrelay;

namespace {

SimConfig canonical(std::uint64_t rounds, std::uint64_t seed,
                    const char* attack = "collective") {
  SimConfig cfg;
  const double omega = 1.5;
  const auto [g, gp] = named_attack(attack_kind_from_name(attack), omega);
  cfg.params = AttackParams{0.9, omega, g, gp, 1.0, 1.0};
  cfg.mu = 100.0;
  cfg.rounds = rounds;
  cfg.seed = seed;
  return cfg;
}

// Residual covariance of the first four record channels after conditioning
// on the relay channels, computed from an exact 6x6 covariance.
std::array<double, 16> conditional_from(const std::array<double, 36>& c) {
  const double g00 = c[4 * 6 + 4];
  const double g01 = c[4 * 6 + 5];
  const double g11 = c[5 * 6 + 5];
  const double det = g00 * g11 - g01 * g01;
  std::array<double, 16> r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double ci0 = c[static_cast<std::size_t>(i) * 6 + 4];
      const double ci1 = c[static_cast<std::size_t>(i) * 6 + 5];
      const double cj0 = c[static_cast<std::size_t>(j) * 6 + 4];
      const double cj1 = c[static_cast<std::size_t>(j) * 6 + 5];
      const double proj = (ci0 * (g11 * cj0 - g01 * cj1) + ci1 * (g00 * cj1 - g01 * cj0)) / det;
      r[static_cast<std::size_t>(i) * 4 + j] = c[static_cast<std::size_t>(i) * 6 + j] - proj;
    }
  return r;
}

}  // namespace

TEST_CASE("analytic record covariance matches the conditional-state theory") {
  // The round transform and the covariance pipeline are independent
  // derivations; conditioning the former's record law on the relay outcome
  // must land on (post-relay CM + I) / 2, heterodyne vacua included.
  for (const char* attack : {"collective", "epr-negative", "sep-plus"}) {
    for (double mu : {2.0, 10.0, 100.0}) {
      for (double eta : {1.0, 0.8}) {
        SimConfig cfg = canonical(10000, 1, attack);
        cfg.mu = mu;
        cfg.params.eta = eta;
        cfg.params.etap = eta == 1.0 ? 1.0 : 0.9;
        const auto cov = analytic_record_covariance(cfg);
        const auto cond = conditional_from(cov);
        const CovarianceMatrix post = post_relay_cm(cfg.mu, cfg.params);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            const double expected = 0.5 * (post.at(i, j) + (i == j ? 1.0 : 0.0));
            CAPTURE(attack);
            CAPTURE(mu);
            CAPTURE(eta);
            CHECK(cond[static_cast<std::size_t>(i) * 4 + j] ==
                  doctest::Approx(expected).epsilon(1e-10));
          }
      }
    }
  }
}

TEST_CASE("simulation is deterministic in the seed") {
  const SimConfig cfg = canonical(20000, 5);
  const SampleBatch a = simulate(cfg);
  const SampleBatch b = simulate(cfg);
  CHECK(a.rounds == b.rounds);
  CHECK(std::memcmp(a.mean.data(), b.mean.data(), sizeof(a.mean)) == 0);
  CHECK(std::memcmp(a.cov.data(), b.cov.data(), sizeof(a.cov)) == 0);
  CHECK(std::memcmp(a.internal_variance.data(), b.internal_variance.data(),
                    sizeof(a.internal_variance)) == 0);

  SimConfig other = cfg;
  other.seed = 6;
  const SampleBatch c = simulate(other);
  CHECK(std::memcmp(a.cov.data(), c.cov.data(), sizeof(a.cov)) != 0);
}

TEST_CASE("empirical covariance matches theory within five standard errors") {
  const SimConfig cfg = canonical(200000, 42);
  const SampleBatch batch = simulate(cfg);
  const auto analytic = analytic_record_covariance(cfg);
  const double n = static_cast<double>(batch.rounds);
  for (int i = 0; i < kRecordChannels; ++i) {
    CHECK(std::abs(batch.mean[static_cast<std::size_t>(i)]) <=
          5.0 * std::sqrt(analytic[static_cast<std::size_t>(i) * 6 + i] / n));
    for (int j = i; j < kRecordChannels; ++j) {
      const double vii = analytic[static_cast<std::size_t>(i) * 6 + i];
      const double vjj = analytic[static_cast<std::size_t>(j) * 6 + j];
      const double vij = analytic[static_cast<std::size_t>(i) * 6 + j];
      const double se = std::sqrt((vii * vjj + vij * vij) / n);
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(batch.covariance(i, j) - vij) <= 5.0 * se);
    }
  }
  const double relay_var = cfg.params.tau * cfg.mu + (1.0 - cfg.params.tau) * cfg.params.omega;
  for (int k = 0; k < kInternalChannels; ++k) {
    const double se = relay_var * std::sqrt(2.0 / n);
    CHECK(std::abs(batch.internal_variance[static_cast<std::size_t>(k)] - relay_var) <=
          5.0 * se);
  }
}

TEST_CASE("conditional covariance estimate agrees with the post-relay state") {
  for (const char* attack : {"collective", "epr-negative"}) {
    const SimConfig cfg = canonical(200000, 42, attack);
    const SampleBatch batch = simulate(cfg);
    const ConditionalCmEstimate est = empirical_conditional_cm(batch);
    const CovarianceMatrix post = post_relay_cm(cfg.mu, cfg.params);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double expected = 0.5 * (post.at(i, j) + (i == j ? 1.0 : 0.0));
        CAPTURE(attack);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(est.at(i, j) - expected) <= 5.0 * est.stderr_at(i, j));
      }
  }
}

TEST_CASE("empirical mutual information matches the analytic value") {
  for (const char* attack : {"collective", "epr-negative"}) {
    const SimConfig cfg = canonical(200000, 42, attack);
    const SampleBatch batch = simulate(cfg);
    const MutualInformationEstimate est = empirical_mutual_information(batch);
    RateConfig rc;
    rc.mu = cfg.mu;
    const double analytic = mutual_information(cfg.params, rc);
    CAPTURE(attack);
    CHECK(std::abs(est.ab_given_gamma - analytic) <= 3.0 * est.ab_se);
    const double analytic_ag = gaussian_pair_mi(analytic_record_covariance(cfg), 0, 1, 4, 5);
    CHECK(std::abs(est.alpha_gamma - analytic_ag) <= 5.0 * est.alpha_gamma_se);
  }
}

TEST_CASE("relay outcome is strongly correlated with the key quadratures") {
  const SimConfig cfg = canonical(200000, 13);
  const SampleBatch batch = simulate(cfg);
  const CorrelationEstimate est = relay_difference_correlation(batch);
  CHECK(est.corr_q > 0.99);
  CHECK(est.corr_p < -0.99);

  const auto cov = analytic_record_covariance(cfg);
  const auto entry = [&cov](int i, int j) { return cov[static_cast<std::size_t>(i) * 6 + j]; };
  const double var_dq = entry(0, 0) + entry(2, 2) - 2.0 * entry(0, 2);
  const double r0 = (entry(4, 0) - entry(4, 2)) / std::sqrt(entry(4, 4) * var_dq);
  CHECK(std::abs(std::atanh(est.corr_q) - std::atanh(r0)) <= 5.0 * est.fisher_se);
}

TEST_CASE("standard errors shrink like the square root of the sample size") {
  const SampleBatch small = simulate(canonical(50000, 8));
  const SampleBatch large = simulate(canonical(200000, 8));
  const double ratio_mi = empirical_mutual_information(small).ab_se /
                          empirical_mutual_information(large).ab_se;
  CHECK(ratio_mi == doctest::Approx(2.0).epsilon(0.1));
  const double ratio_cm =
      empirical_conditional_cm(small).stderr_at(0, 0) /
      empirical_conditional_cm(large).stderr_at(0, 0);
  CHECK(ratio_cm == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("record dump streams every round and leaves statistics unchanged") {
  SimConfig cfg = canonical(12000, 3);
  std::ostringstream dump;
  const SampleBatch with_dump = simulate(cfg, &dump);
  const SampleBatch without = simulate(cfg);
  CHECK(std::memcmp(with_dump.cov.data(), without.cov.data(), sizeof(without.cov)) == 0);

  std::istringstream in(dump.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "round,alpha_q,alpha_p,beta_q,beta_p,gamma_q,gamma_p");
  std::uint64_t rows = 0;
  while (std::getline(in, line)) {
    if (rows == 0) CHECK(line.substr(0, 2) == "0,");
    ++rows;
  }
  CHECK(rows == cfg.rounds);
}

TEST_CASE("estimators refuse undersized batches") {
  const SampleBatch batch = simulate(canonical(10000, 1));
  CHECK_NOTHROW(empirical_conditional_cm(batch));
  SampleBatch tiny = batch;
  tiny.rounds = 9999;
  CHECK_THROWS_AS(empirical_conditional_cm(tiny), std::invalid_argument);
  CHECK_THROWS_AS(empirical_mutual_information(tiny), std::invalid_argument);
  CHECK_THROWS_AS(relay_difference_correlation(tiny), std::invalid_argument);
}

TEST_CASE("pair mutual information helper") {
  std::array<double, 36> cov{};
  for (int i = 0; i < 6; ++i) cov[static_cast<std::size_t>(i) * 6 + i] = 1.0;
  CHECK(gaussian_pair_mi(cov, 0, 1, 4, 5) == doctest::Approx(0.0).epsilon(1e-12));
  // Correlate channel 0 with channel 4: I = -0.5*log2(1 - rho^2) per pair.
  cov[0 * 6 + 4] = 0.6;
  cov[4 * 6 + 0] = 0.6;
  const double expected = -0.5 * std::log2(1.0 - 0.36);
  CHECK(gaussian_pair_mi(cov, 0, 1, 4, 5) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("simulation configuration validation") {
  SimConfig cfg = canonical(20000, 1);
  cfg.mu = 1.0;
  CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
  cfg = canonical(20000, 1);
  cfg.params.tau = 0.0;
  CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
  cfg = canonical(0, 1);
  CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
}
