#include "cvrelay/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace cvrelay {

namespace {

constexpr double kEulerSq = 7.389056098930650227230427;  // e^2

// Exact symplectic eigenvalue of Bob's doubly-conditional mode, written
// without large-mu cancellation.
double bob_cond_diag(double mu, double tau, double lam) {
  return (tau * (mu + 1.0) + 2.0 * lam * mu) / (tau * (mu + 1.0) + 2.0 * lam);
}

}  // namespace

void check_config(const RateConfig& cfg) {
  if (cfg.mu.has_value()) {
    if (!(*cfg.mu > 1.0) || !(*cfg.mu <= 1e8))
      throw std::invalid_argument("finite modulation mu must lie in (1, 1e8]");
  }
  if (!(cfg.beta > 0.0) || cfg.beta > 1.0)
    throw std::invalid_argument("reconciliation efficiency beta must lie in (0, 1]");
  if (!(cfg.reference_mu > 1.0))
    throw std::invalid_argument("reference modulation must exceed 1");
}

CovarianceMatrix post_relay_cm(double mu, const AttackParams& p) {
  if (!(mu >= 1.0)) throw std::invalid_argument("post_relay_cm requires mu >= 1");
  const NoisePair n = noise_params(p);
  const double t = p.tau * (mu * mu - 1.0) / 2.0;
  const double cq = t / (p.tau * mu + n.lambda);
  const double cp = t / (p.tau * mu + n.lambda_p);

  CovarianceMatrix v(2);
  v.set(0, 0, mu - cq);
  v.set(1, 1, mu - cp);
  v.set(2, 2, mu - cq);
  v.set(3, 3, mu - cp);
  v.set(0, 2, cq);
  v.set(1, 3, -cp);
  return v;
}

CovarianceMatrix bell_condition_blocks(double mu, const AttackParams& p) {
  if (!(mu >= 1.0)) throw std::invalid_argument("bell_condition_blocks requires mu >= 1");
  check_params(p);

  // Blocks of the total CM of (a, b, A', B'): B1 = B2 = [tau*mu+(1-tau)*omega]I,
  // D = (1-tau)*diag(g, gp), C1 = [sqrt(tau(mu^2-1))Z; 0], C2 = [0; sqrt(tau(mu^2-1))Z].
  const double b_diag = p.tau * mu + (1.0 - p.tau) * p.omega;
  const double b1[2][2] = {{b_diag, 0.0}, {0.0, b_diag}};
  const double b2[2][2] = {{b_diag, 0.0}, {0.0, b_diag}};
  const double d[2][2] = {{(1.0 - p.tau) * p.g, 0.0}, {0.0, (1.0 - p.tau) * p.gp}};
  const double c = std::sqrt(p.tau * (mu * mu - 1.0));
  double c1[4][2] = {{c, 0.0}, {0.0, -c}, {0.0, 0.0}, {0.0, 0.0}};
  double c2[4][2] = {{0.0, 0.0}, {0.0, 0.0}, {c, 0.0}, {0.0, -c}};

  // Measured-quadrature matrix of the Bell outcome (q_-, p_+), including the
  // detector beam splitters: variances and cross term computed from the B
  // blocks, then the (1-eta)/eta vacuum admixtures on the diagonal.
  const double g1 = (b1[0][0] + b2[0][0] - 2.0 * d[0][0]) / 2.0 + (1.0 - p.eta) / p.eta;
  const double g2 = (b1[1][1] + b2[1][1] + 2.0 * d[1][1]) / 2.0 + (1.0 - p.etap) / p.etap;
  const double g3 = (b1[0][1] + d[0][1] - d[1][0] - b2[0][1]) / 2.0;
  const double gamma[2][2] = {{g1, g3}, {g3, g2}};
  const double det_gamma = gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0];
  if (!(det_gamma > 0.0))
    throw std::runtime_error("bell_condition_blocks: degenerate measurement matrix");

  const double x1[2][2] = {{0.0, 1.0}, {1.0, 0.0}};
  const double x2[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};

  double correction[4][4] = {};
  const double (*cs[2])[2] = {c1, c2};
  const double (*xs[2])[2] = {x1, x2};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      // m = X_i^T gamma X_j
      double m[2][2];
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
          double acc = 0.0;
          for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w) acc += xs[i][u][r] * gamma[u][w] * xs[j][w][s];
          m[r][s] = acc;
        }
      // correction += C_i m C_j^T
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          double acc = 0.0;
          for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w) acc += cs[i][r][u] * m[u][w] * cs[j][s][w];
          correction[r][s] += acc;
        }
    }
  }

  CovarianceMatrix v(2);
  for (int r = 0; r < 4; ++r)
    for (int s = r; s < 4; ++s) {
      const double base = (r == s) ? mu : 0.0;
      v.set(r, s, base - correction[r][s] / (2.0 * det_gamma));
    }
  return v;
}

CovarianceMatrix bob_conditional_cm(double mu, const AttackParams& p) {
  if (!(mu >= 1.0)) throw std::invalid_argument("bob_conditional_cm requires mu >= 1");
  const NoisePair n = noise_params(p);
  CovarianceMatrix v(1);
  v.set(0, 0, bob_cond_diag(mu, p.tau, n.lambda));
  v.set(1, 1, bob_cond_diag(mu, p.tau, n.lambda_p));
  return v;
}

double holevo_information(const AttackParams& p, const RateConfig& cfg) {
  check_config(cfg);
  const NoisePair n = noise_params(p);
  if (n.lambda * n.lambda_p == 0.0) return 0.0;  // Eve decoupled

  if (cfg.mu.has_value()) {
    const double s_ab = von_neumann_entropy(post_relay_cm(*cfg.mu, p));
    const double s_cond = von_neumann_entropy(bob_conditional_cm(*cfg.mu, p));
    return std::max(s_ab - s_cond, 0.0);
  }
  const double nu_cond =
      std::sqrt((p.tau + 2.0 * n.lambda) * (p.tau + 2.0 * n.lambda_p)) / p.tau;
  const double ie = std::log2(kEulerSq * std::sqrt(n.lambda * n.lambda_p) *
                              cfg.reference_mu / (4.0 * p.tau)) -
                    entropy_h(nu_cond);
  return std::max(ie, 0.0);
}

double mutual_information(const AttackParams& p, const RateConfig& cfg) {
  check_config(cfg);
  const NoisePair n = noise_params(p);
  if (cfg.mu.has_value()) {
    // Per-quadrature Gaussian mutual information of the classical outcome CM
    // (V_ab|gamma + I)/2; the common factor 1/2 cancels inside the log ratio.
    const CovarianceMatrix v = post_relay_cm(*cfg.mu, p);
    double total = 0.0;
    for (int quad = 0; quad < 2; ++quad) {
      const double a = v.at(quad, quad) + 1.0;
      const double b = v.at(quad + 2, quad + 2) + 1.0;
      const double c = v.at(quad, quad + 2);
      total += 0.5 * std::log2(a * b / (a * b - c * c));
    }
    return total;
  }
  return std::log2(p.tau * cfg.reference_mu /
                   (4.0 * std::sqrt((p.tau + n.lambda) * (p.tau + n.lambda_p))));
}

RateBreakdown key_rate(const AttackParams& p, const RateConfig& cfg) {
  check_config(cfg);
  RateBreakdown out;
  out.noise = noise_params(p);
  out.eve_decoupled = out.noise.lambda * out.noise.lambda_p == 0.0;

  if (cfg.mu.has_value()) {
    const CovarianceMatrix v = post_relay_cm(*cfg.mu, p);
    const SymplecticSpectrum spec = symplectic_spectrum(v);
    out.nu1 = spec.values[0];
    out.nu2 = spec.values[1];
    const CovarianceMatrix vb = bob_conditional_cm(*cfg.mu, p);
    out.nu_cond = symplectic_spectrum(vb).values[0];
  } else {
    // Exact spectra evaluated at the reference modulation; nu_cond has a
    // modulation-free limit.
    const double mu = cfg.reference_mu;
    out.nu1 = std::sqrt(mu * (mu * out.noise.lambda + p.tau) /
                        (p.tau * mu + out.noise.lambda));
    out.nu2 = std::sqrt(mu * (mu * out.noise.lambda_p + p.tau) /
                        (p.tau * mu + out.noise.lambda_p));
    out.nu_cond = std::sqrt((p.tau + 2.0 * out.noise.lambda) *
                            (p.tau + 2.0 * out.noise.lambda_p)) /
                  p.tau;
  }

  out.i_ab = mutual_information(p, cfg);
  out.i_e = holevo_information(p, cfg);
  out.rate = cfg.beta * out.i_ab - out.i_e;
  return out;
}

double rate_asymptotic_closed(double tau, double lambda, double lambda_p) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::invalid_argument("rate_asymptotic_closed requires tau in (0, 1]");
  if (lambda < 0.0 || lambda_p < 0.0)
    throw std::invalid_argument("rate_asymptotic_closed requires nonnegative noises");
  if (lambda * lambda_p == 0.0) {
    // Eve decoupled: the rate is the mutual information at the reference
    // modulation of the asymptotic breakdown.
    const RateConfig cfg;
    return std::log2(tau * cfg.reference_mu /
                     (4.0 * std::sqrt((tau + lambda) * (tau + lambda_p))));
  }
  const double nu_cond = std::sqrt((tau + 2.0 * lambda) * (tau + 2.0 * lambda_p)) / tau;
  return std::log2(tau * tau /
                   (kEulerSq * std::sqrt(lambda * lambda_p * (tau + lambda) *
                                         (tau + lambda_p)))) +
         entropy_h(nu_cond);
}

double rate_min_closed(double tau, double omega) {
  if (!(omega >= 1.0)) throw std::invalid_argument("rate_min_closed requires omega >= 1");
  const double lam = (1.0 - tau) * (omega + std::sqrt(omega * omega - 1.0));
  return rate_asymptotic_closed(tau, lam, lam);
}

double rate_collective_closed(double tau, double omega) {
  if (!(omega >= 1.0))
    throw std::invalid_argument("rate_collective_closed requires omega >= 1");
  const double lam = (1.0 - tau) * omega;
  return rate_asymptotic_closed(tau, lam, lam);
}

}  // namespace cvrelay
