#pragma once

#include <optional>

#include "cvrelay/attack.hpp"
#include "cvrelay/covariance.hpp"

namespace cvrelay {

// Modulation mode plus reconciliation efficiency. An empty `mu` selects the
// asymptotic (infinite-modulation) closed forms; a finite value selects the
// numeric route through the post-relay covariance matrix. In asymptotic mode
// the per-term breakdown entries are reported at `reference_mu` so that
// rate = beta*i_ab - i_e still holds term by term; the rate itself is free of
// the reference since the modulation terms cancel.
struct RateConfig {
  std::optional<double> mu;
  double beta = 1.0;
  double reference_mu = 1e6;
};

void check_config(const RateConfig& cfg);

struct RateBreakdown {
  NoisePair noise;
  double nu1 = 1.0;
  double nu2 = 1.0;
  double nu_cond = 1.0;
  double i_ab = 0.0;
  double i_e = 0.0;
  double rate = 0.0;
  // Set when lambda*lambda_p == 0: Eve holds no correlated output and her
  // Holevo information is zero.
  bool eve_decoupled = false;
};

// Covariance matrix of Alice's and Bob's retained modes conditioned on the
// relay's Bell outcome, ordering (q_a, p_a, q_b, p_b).
CovarianceMatrix post_relay_cm(double mu, const AttackParams& p);

// Same state computed along the independent block route: assembles the total
// CM of (a, b, A', B') from its published block expressions, derives the
// measured-quadrature matrix gamma(eta, etap) from those blocks, and
// evaluates the Bell conditioning sum. Agrees with post_relay_cm elementwise.
CovarianceMatrix bell_condition_blocks(double mu, const AttackParams& p);

// Bob's mode conditioned on both the relay outcome and Alice's heterodyne.
CovarianceMatrix bob_conditional_cm(double mu, const AttackParams& p);

double holevo_information(const AttackParams& p, const RateConfig& cfg);
double mutual_information(const AttackParams& p, const RateConfig& cfg);

RateBreakdown key_rate(const AttackParams& p, const RateConfig& cfg);

// Asymptotic ideal-detection rate for given effective noises, beta = 1.
double rate_asymptotic_closed(double tau, double lambda, double lambda_p);

// Rate of the optimal (negative EPR) attack: lambda = (1-tau)(omega + sqrt(omega^2-1)).
double rate_min_closed(double tau, double omega);

// Rate of the one-mode collective attack: lambda = (1-tau)*omega.
double rate_collective_closed(double tau, double omega);

}  // namespace cvrelay
