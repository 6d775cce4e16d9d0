#include "cvrelay/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cvrelay {

namespace {

constexpr int kMaxDim = 2 * CovarianceMatrix::kMaxModes;

// Dense row-major scratch matrix of runtime dimension n <= kMaxDim.
struct Scratch {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

Scratch make_scratch(int n) {
  Scratch s;
  s.n = n;
  return s;
}

// Cyclic Jacobi eigenvalue iteration for a symmetric matrix. Eigenvalues land
// in `eval`; if `evec` is non-null it receives the orthonormal eigenvectors as
// columns. Dimensions here are tiny (n <= 8) so convergence is fast.
void jacobi_eigensymm(Scratch a, double* eval, Scratch* evec) {
  const int n = a.n;
  if (evec != nullptr) {
    *evec = make_scratch(n);
    for (int i = 0; i < n; ++i) (*evec)(i, i) = 1.0;
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-28) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (evec != nullptr) {
          for (int k = 0; k < n; ++k) {
            const double vkp = (*evec)(k, p);
            const double vkq = (*evec)(k, q);
            (*evec)(k, p) = c * vkp - s * vkq;
            (*evec)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    if (sweep == 99) throw std::runtime_error("jacobi eigensolver failed to converge");
  }
  for (int i = 0; i < a.n; ++i) eval[i] = a(i, i);
}

Scratch to_scratch(const CovarianceMatrix& v) {
  Scratch s = make_scratch(v.dim());
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) s(i, j) = v.at(i, j);
  return s;
}

Scratch matmul(const Scratch& x, const Scratch& y) {
  Scratch r = make_scratch(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < x.n; ++k) acc += x(i, k) * y(k, j);
      r(i, j) = acc;
    }
  return r;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(int modes) : modes_(modes) {
  if (modes < 1 || modes > kMaxModes)
    throw std::invalid_argument("covariance matrix supports 1 to 4 modes");
}

std::size_t CovarianceMatrix::idx(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim() || j >= dim())
    throw std::invalid_argument("covariance matrix index out of range");
  return static_cast<std::size_t>(i) * dim() + j;
}

CovarianceMatrix CovarianceMatrix::identity(int modes) {
  CovarianceMatrix v(modes);
  for (int i = 0; i < v.dim(); ++i) v.set(i, i, 1.0);
  return v;
}

bool CovarianceMatrix::is_symmetric(double rel_tol) const {
  double scale = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) scale = std::max(scale, std::abs(at(i, j)));
  if (scale == 0.0) return true;
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j)
      if (std::abs(at(i, j) - at(j, i)) > rel_tol * scale) return false;
  return true;
}

double SymplecticSpectrum::min() const {
  if (values.empty()) throw std::invalid_argument("empty symplectic spectrum");
  return values.back();
}

CovarianceMatrix epr_cm(double mu) {
  if (!(mu >= 1.0)) throw std::invalid_argument("epr_cm requires mu >= 1");
  const double s = std::sqrt(mu * mu - 1.0);
  CovarianceMatrix v(2);
  v.set(0, 0, mu);
  v.set(1, 1, mu);
  v.set(2, 2, mu);
  v.set(3, 3, mu);
  v.set(0, 2, s);
  v.set(1, 3, -s);
  return v;
}

CovarianceMatrix two_mode_attack_cm(double omega, double g, double gp) {
  if (!(omega >= 1.0)) throw std::invalid_argument("two_mode_attack_cm requires omega >= 1");
  CovarianceMatrix v(2);
  v.set(0, 0, omega);
  v.set(1, 1, omega);
  v.set(2, 2, omega);
  v.set(3, 3, omega);
  v.set(0, 2, g);
  v.set(1, 3, gp);
  if (!is_physical(v))
    throw std::invalid_argument("two_mode_attack_cm: (omega, g, gp) is not a physical state");
  return v;
}

SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& v) {
  if (!v.is_symmetric())
    throw std::invalid_argument("symplectic_spectrum requires a symmetric matrix");
  const int n = v.dim();

  // Route: V = U diag(d) U^T, A = V^{1/2}; W = A Omega A is antisymmetric and
  // similar to Omega V, so the eigenvalues of the symmetric PSD matrix W W^T
  // are the squared symplectic eigenvalues, each appearing twice.
  double d[kMaxDim];
  Scratch u;
  jacobi_eigensymm(to_scratch(v), d, &u);
  for (int i = 0; i < n; ++i) {
    if (d[i] <= 0.0)
      throw std::invalid_argument("symplectic_spectrum requires a positive-definite matrix");
  }
  Scratch a = make_scratch(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += u(i, k) * std::sqrt(d[k]) * u(j, k);
      a(i, j) = acc;
    }
  Scratch omega = make_scratch(n);
  for (int k = 0; k < n / 2; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  const Scratch w = matmul(matmul(a, omega), a);
  Scratch wwt = make_scratch(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += w(i, k) * w(j, k);
      wwt(i, j) = acc;
    }
  double sq[kMaxDim];
  jacobi_eigensymm(wwt, sq, nullptr);
  std::sort(sq, sq + n, std::greater<double>());

  SymplecticSpectrum spec;
  spec.values.reserve(static_cast<std::size_t>(n / 2));
  for (int j = 0; j < n / 2; ++j) {
    const double pair_mean = (sq[2 * j] + sq[2 * j + 1]) / 2.0;
    spec.values.push_back(std::sqrt(std::max(pair_mean, 0.0)));
  }
  return spec;
}

double entropy_h(double x) {
  if (x < 1.0 - 1e-6) throw std::invalid_argument("entropy_h requires x >= 1");
  if (x <= 1.0) return 0.0;
  const double up = (x + 1.0) / 2.0;
  const double dn = (x - 1.0) / 2.0;
  return up * std::log2(up) - dn * std::log2(dn);
}

double von_neumann_entropy(const CovarianceMatrix& v) {
  const SymplecticSpectrum spec = symplectic_spectrum(v);
  double s = 0.0;
  for (double nu : spec.values) s += entropy_h(nu);
  return s;
}

CovarianceMatrix condition_on_heterodyne(const CovarianceMatrix& v, int measured_mode) {
  if (measured_mode < 0 || measured_mode >= v.modes())
    throw std::invalid_argument("condition_on_heterodyne: measured mode out of range");
  if (v.modes() < 2)
    throw std::invalid_argument("condition_on_heterodyne needs at least two modes");

  const int mq = 2 * measured_mode;
  // (A + I)^{-1} for the measured mode's 2x2 block, in closed form.
  const double a00 = v.at(mq, mq) + 1.0;
  const double a01 = v.at(mq, mq + 1);
  const double a11 = v.at(mq + 1, mq + 1) + 1.0;
  const double det = a00 * a11 - a01 * a01;
  if (!(det > 0.0) || !std::isfinite(det))
    throw std::runtime_error("condition_on_heterodyne: singular measured block");
  const double i00 = a11 / det;
  const double i01 = -a01 / det;
  const double i11 = a00 / det;

  std::vector<int> keep;
  for (int m = 0; m < v.modes(); ++m)
    if (m != measured_mode) keep.push_back(m);

  CovarianceMatrix out(static_cast<int>(keep.size()));
  for (std::size_t bi = 0; bi < keep.size(); ++bi) {
    for (std::size_t bj = bi; bj < keep.size(); ++bj) {
      for (int qi = 0; qi < 2; ++qi) {
        for (int qj = 0; qj < 2; ++qj) {
          const int i = 2 * keep[bi] + qi;
          const int j = 2 * keep[bj] + qj;
          const double c0i = v.at(mq, i);
          const double c1i = v.at(mq + 1, i);
          const double c0j = v.at(mq, j);
          const double c1j = v.at(mq + 1, j);
          const double corr = c0i * (i00 * c0j + i01 * c1j) + c1i * (i01 * c0j + i11 * c1j);
          out.set(2 * static_cast<int>(bi) + qi, 2 * static_cast<int>(bj) + qj,
                  v.at(i, j) - corr);
        }
      }
    }
  }
  return out;
}

bool is_physical(const CovarianceMatrix& v) {
  if (!v.is_symmetric()) return false;
  double d[kMaxDim];
  jacobi_eigensymm(to_scratch(v), d, nullptr);
  for (int i = 0; i < v.dim(); ++i)
    if (d[i] <= 0.0) return false;
  return symplectic_spectrum(v).min() >= 1.0 - 1e-9;
}

}  // namespace cvrelay
