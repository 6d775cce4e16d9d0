#include "cvrelay/threshold.hpp"

#include <cmath>
#include <stdexcept>

#include "cvrelay/parallel.hpp"

namespace cvrelay {

namespace {

double rate_at_omega(double tau, AttackKind kind, const RateConfig& cfg, double eta,
                     double etap, double omega) {
  const auto [g, gp] = named_attack(kind, omega);
  return key_rate(AttackParams{tau, omega, g, gp, eta, etap}, cfg).rate;
}

// Exact zeros at scan points are classed as positive so a crossing always
// shows up as a sign flip in one of the adjacent brackets.
int sign_of(double r) { return r >= 0.0 ? 1 : -1; }

}  // namespace

ThresholdPoint threshold_omega(double tau, AttackKind kind, const RateConfig& cfg,
                               double eta, double etap, double omega_max,
                               int scan_points) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::invalid_argument("threshold_omega requires tau in (0, 1]");
  if (!(omega_max > 1.0))
    throw std::invalid_argument("threshold_omega requires omega_max > 1");
  if (scan_points < 2)
    throw std::invalid_argument("threshold_omega requires at least 2 scan points");
  check_config(cfg);

  ThresholdPoint point;
  point.tau = tau;
  point.distance_km = distance_from_tau(tau);

  const double step = (omega_max - 1.0) / (scan_points - 1);
  std::vector<double> rates(static_cast<std::size_t>(scan_points));
  for (int i = 0; i < scan_points; ++i)
    rates[static_cast<std::size_t>(i)] = rate_at_omega(tau, kind, cfg, eta, etap, 1.0 + step * i);

  bool any_positive = false;
  for (int i = 0; i + 1 < scan_points; ++i) {
    const double ra = rates[static_cast<std::size_t>(i)];
    const double rb = rates[static_cast<std::size_t>(i + 1)];
    if (ra > 0.0) any_positive = true;
    if (sign_of(ra) == sign_of(rb)) continue;

    double a = 1.0 + step * i;
    double b = a + step;
    double fa = ra;
    while (b - a > 1e-8) {
      const double mid = (a + b) / 2.0;
      const double fm = rate_at_omega(tau, kind, cfg, eta, etap, mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (sign_of(fa) != sign_of(fm)) {
        b = mid;
      } else {
        a = mid;
        fa = fm;
      }
    }
    ThresholdRoot root;
    root.omega = (a + b) / 2.0;
    root.sign_below = sign_of(ra);
    root.sign_above = sign_of(rb);
    point.roots.push_back(root);
  }
  if (rates.back() > 0.0) any_positive = true;

  if (point.roots.empty()) point.constant_sign = any_positive ? 1 : -1;
  return point;
}

double tau_from_distance(double d_km) {
  if (!(d_km >= 0.0)) throw std::invalid_argument("distance must be nonnegative");
  return std::pow(10.0, -0.02 * d_km);
}

double distance_from_tau(double tau) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::invalid_argument("tau must lie in (0, 1] for distance conversion");
  return -50.0 * std::log10(tau) + 0.0;
}

std::vector<ThresholdPoint> threshold_curve(AttackKind kind, const RateConfig& cfg,
                                            const std::vector<double>& taus,
                                            double eta, double etap, double omega_max,
                                            int scan_points) {
  std::vector<ThresholdPoint> curve(taus.size());
  parallel_for_indexed(taus.size(), [&](std::size_t i) {
    curve[i] = threshold_omega(taus[i], kind, cfg, eta, etap, omega_max, scan_points);
  });
  return curve;
}

OptimalModulation optimal_modulation(double tau, double omega, AttackKind kind,
                                     double beta, double eta, double etap,
                                     const std::vector<double>& mu_grid) {
  if (mu_grid.empty()) throw std::invalid_argument("optimal_modulation requires a mu grid");
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > 1.0))
      throw std::invalid_argument("optimal_modulation requires all mu > 1");
    if (i > 0 && !(mu_grid[i] > mu_grid[i - 1]))
      throw std::invalid_argument("optimal_modulation requires an ascending mu grid");
  }

  const auto [g, gp] = named_attack(kind, omega);
  const AttackParams p{tau, omega, g, gp, eta, etap};

  OptimalModulation out;
  out.rates.resize(mu_grid.size());
  parallel_for_indexed(mu_grid.size(), [&](std::size_t i) {
    RateConfig cfg;
    cfg.mu = mu_grid[i];
    cfg.beta = beta;
    out.rates[i] = key_rate(p, cfg).rate;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < mu_grid.size(); ++i)
    if (out.rates[i] > out.rates[best]) best = i;
  out.mu_star = mu_grid[best];
  out.rate_star = out.rates[best];
  out.all_negative = out.rate_star < 0.0;
  return out;
}

}  // namespace cvrelay
