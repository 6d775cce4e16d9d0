#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace cvrelay {

// Real symmetric 2n x 2n covariance matrix in shot-noise units (vacuum
// variance = 1), quadrature ordering (q1, p1, ..., qn, pn). Capacity is fixed
// at 4 modes, which covers every state handled by the rate pipeline.
class CovarianceMatrix {
 public:
  static constexpr int kMaxModes = 4;

  explicit CovarianceMatrix(int modes);

  int modes() const { return modes_; }
  int dim() const { return 2 * modes_; }

  double at(int i, int j) const { return m_[idx(i, j)]; }
  void set(int i, int j, double v) {
    m_[idx(i, j)] = v;
    m_[idx(j, i)] = v;
  }

  static CovarianceMatrix identity(int modes);

  bool is_symmetric(double rel_tol = 1e-12) const;

 private:
  std::size_t idx(int i, int j) const;

  int modes_;
  std::array<double, 4 * kMaxModes * kMaxModes> m_{};
};

struct SymplecticSpectrum {
  // Descending-sorted moduli of the eigenvalues of i*Omega*V, one per mode.
  std::vector<double> values;

  double min() const;
};

// EPR (two-mode squeezed vacuum) covariance matrix: diagonal blocks mu*I,
// off-diagonal blocks sqrt(mu^2-1)*Z.
CovarianceMatrix epr_cm(double mu);

// Symmetric two-mode state with diagonal blocks omega*I and off-diagonal
// correlation block G = diag(g, gp). Throws if the triple is unphysical.
CovarianceMatrix two_mode_attack_cm(double omega, double g, double gp);

SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& v);

// Thermal-state entropy h(x) in bits; h(1) = 0 by continuous limit. Values in
// [1 - 1e-6, 1) clamp to 1; smaller inputs are rejected as unphysical.
double entropy_h(double x);

double von_neumann_entropy(const CovarianceMatrix& v);

// Conditions a Gaussian state on a heterodyne measurement of one mode:
// returns B - C^T (A + I)^{-1} C on the remaining modes.
CovarianceMatrix condition_on_heterodyne(const CovarianceMatrix& v, int measured_mode);

// Symmetric, positive-definite, and all symplectic eigenvalues >= 1 - 1e-9.
bool is_physical(const CovarianceMatrix& v);

}  // namespace cvrelay
