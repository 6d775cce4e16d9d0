#pragma once

#include <vector>

#include "cvrelay/attack.hpp"
#include "cvrelay/rate.hpp"

namespace cvrelay {

struct ThresholdRoot {
  double omega = 1.0;
  // Sign of the rate just below / above the root: +1 or -1. The standard
  // pattern is (+, -); the inverted regime reports (-, +).
  int sign_below = 0;
  int sign_above = 0;
};

struct ThresholdPoint {
  double tau = 0.0;
  double distance_km = 0.0;
  std::vector<ThresholdRoot> roots;  // ascending in omega
  // When no sign change exists on the scanned interval: +1 (rate everywhere
  // positive) or -1 (everywhere negative); 0 when roots were found.
  int constant_sign = 0;
};

// Scans R(omega) for the named attack on [1, omega_max] with `scan_points`
// coarse samples, brackets every sign change, and bisects each bracket to
// |delta omega| <= 1e-8. Multiple and inverted roots are legal outputs.
ThresholdPoint threshold_omega(double tau, AttackKind kind, const RateConfig& cfg,
                               double eta = 1.0, double etap = 1.0,
                               double omega_max = 10.0, int scan_points = 400);

// Fibre-loss conversion at 0.2 dB/km: tau = 10^(-0.02 d).
double tau_from_distance(double d_km);
double distance_from_tau(double tau);

// Per-point threshold_omega over a transmissivity grid, evaluated in parallel
// with positionally deterministic output.
std::vector<ThresholdPoint> threshold_curve(AttackKind kind, const RateConfig& cfg,
                                            const std::vector<double>& taus,
                                            double eta = 1.0, double etap = 1.0,
                                            double omega_max = 10.0,
                                            int scan_points = 400);

struct OptimalModulation {
  double mu_star = 0.0;
  double rate_star = 0.0;
  bool all_negative = false;
  std::vector<double> rates;  // one per grid entry
};

// Argmax of the finite-modulation rate over an ascending mu grid.
OptimalModulation optimal_modulation(double tau, double omega, AttackKind kind,
                                     double beta, double eta, double etap,
                                     const std::vector<double>& mu_grid);

}  // namespace cvrelay
