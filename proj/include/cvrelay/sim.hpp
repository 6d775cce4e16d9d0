#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

#include "cvrelay/attack.hpp"
#include "cvrelay/kernels.hpp"
#include "cvrelay/rng.hpp"

namespace cvrelay {

struct SimConfig {
  AttackParams params;
  double mu = 100.0;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 1;
};

// Finalized per-run statistics. Record channel order: alpha_q, alpha_p,
// beta_q, beta_p, gamma_q, gamma_p; internal channels are the relay-input
// quadratures qA', pA', qB', pB'.
struct SampleBatch {
  SimConfig cfg;
  std::uint64_t rounds = 0;
  std::array<double, kRecordChannels> mean{};
  // Unbiased covariance, row-major 6x6.
  std::array<double, kRecordChannels * kRecordChannels> cov{};
  std::array<double, kInternalChannels> internal_variance{};

  double covariance(int i, int j) const { return cov[static_cast<std::size_t>(i) * kRecordChannels + j]; }
};

// Row-major 10x18 coefficient matrix mapping a round's 18 standard normals to
// its channels; the entire round is this one linear transform.
std::array<double, kChannels * kNormalsPerRound> build_round_matrix(const SimConfig& cfg);

// Exact covariance of the six recorded observables implied by the round
// transform (L L^T restricted to record rows).
std::array<double, kRecordChannels * kRecordChannels> analytic_record_covariance(const SimConfig& cfg);

// Runs the Monte Carlo protocol. Rounds are processed in fixed 4096-round
// chunks whose partial accumulators are folded in chunk order, so results are
// identical for any thread count. A non-null dump stream receives one CSV row
// per round (written sequentially) with header
// round,alpha_q,alpha_p,beta_q,beta_p,gamma_q,gamma_p.
SampleBatch simulate(const SimConfig& cfg, std::ostream* dump = nullptr);

struct ConditionalCmEstimate {
  // Residual covariance of (alpha_q, alpha_p, beta_q, beta_p) after linear
  // regression on (gamma_q, gamma_p), with asymptotic standard errors.
  std::array<double, 16> value{};
  std::array<double, 16> se{};

  double at(int i, int j) const { return value[static_cast<std::size_t>(i) * 4 + j]; }
  double stderr_at(int i, int j) const { return se[static_cast<std::size_t>(i) * 4 + j]; }
};

ConditionalCmEstimate empirical_conditional_cm(const SampleBatch& batch);

struct MutualInformationEstimate {
  double ab_given_gamma = 0.0;  // Gaussian plug-in I(alpha; beta | gamma)
  double ab_se = 0.0;
  double alpha_gamma = 0.0;  // Gaussian plug-in I(alpha; gamma)
  double alpha_gamma_se = 0.0;
};

MutualInformationEstimate empirical_mutual_information(const SampleBatch& batch);

// Gaussian mutual information in bits between channel pairs (a0, a1) and
// (b0, b1) of a 6x6 record covariance matrix.
double gaussian_pair_mi(const std::array<double, kRecordChannels * kRecordChannels>& cov, int a0,
                        int a1, int b0, int b1);

struct CorrelationEstimate {
  double corr_q = 0.0;  // corr(gamma_q, alpha_q - beta_q)
  double corr_p = 0.0;  // corr(gamma_p, alpha_p + beta_p)
  double fisher_se = 0.0;  // standard error on atanh(corr)
};

CorrelationEstimate relay_difference_correlation(const SampleBatch& batch);

}  // namespace cvrelay
