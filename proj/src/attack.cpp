#include "cvrelay/attack.hpp"

#include <cmath>
#include <stdexcept>

#include "cvrelay/kernels.hpp"

namespace cvrelay {

namespace {
constexpr double kBoundaryTol = 1e-12;
}

bool validate(double omega, double g, double gp) {
  if (!(omega >= 1.0)) throw std::invalid_argument("validate requires omega >= 1");
  if (std::abs(g) >= omega || std::abs(gp) >= omega) return false;
  return omega * std::abs(g + gp) <= omega * omega + g * gp - 1.0 + kBoundaryTol;
}

bool is_separable(double omega, double g, double gp) {
  if (!validate(omega, g, gp))
    throw std::invalid_argument("is_separable requires a valid (omega, g, gp) triple");
  return omega * omega - g * gp - 1.0 >= omega * std::abs(g - gp);
}

std::pair<double, double> named_attack(AttackKind kind, double omega) {
  if (!(omega >= 1.0)) throw std::invalid_argument("named_attack requires omega >= 1");
  const double s = std::sqrt(omega * omega - 1.0);
  switch (kind) {
    case AttackKind::collective:
      return {0.0, 0.0};
    case AttackKind::sep_plus:
      return {omega - 1.0, omega - 1.0};
    case AttackKind::sep_minus:
      return {1.0 - omega, 1.0 - omega};
    case AttackKind::sep_qcorr:
      return {omega - 1.0, 1.0 - omega};
    case AttackKind::sep_pcorr:
      return {1.0 - omega, omega - 1.0};
    case AttackKind::epr_positive:
      return {s, -s};
    case AttackKind::epr_negative:
      return {-s, s};
  }
  throw std::invalid_argument("unknown attack kind");
}

NoisePair noise_params(const AttackParams& p) {
  check_params(p);
  NoisePair n;
  n.lambda = (p.omega - p.g) * (1.0 - p.tau) + (1.0 - p.eta) / p.eta;
  n.lambda_p = (p.omega + p.gp) * (1.0 - p.tau) + (1.0 - p.etap) / p.etap;
  return n;
}

void check_params(const AttackParams& p) {
  if (!(p.tau > 0.0) || p.tau > 1.0)
    throw std::invalid_argument("link transmissivity tau must lie in (0, 1]");
  if (!(p.eta > 0.0) || p.eta > 1.0 || !(p.etap > 0.0) || p.etap > 1.0)
    throw std::invalid_argument("detector efficiencies must lie in (0, 1]");
  if (!validate(p.omega, p.g, p.gp))
    throw std::invalid_argument("attack correlations (g, gp) are unphysical for this omega");
}

std::vector<PlaneCell> classify_plane(double omega, int resolution) {
  if (!(omega >= 1.0)) throw std::invalid_argument("classify_plane requires omega >= 1");
  if (resolution < 3) throw std::invalid_argument("classify_plane requires resolution >= 3");

  const auto& kern = active_kernels();
  std::vector<PlaneCell> cells(static_cast<std::size_t>(resolution) * resolution);
  std::vector<double> gs(resolution), gps(resolution);
  const double step = 2.0 * omega / (resolution - 1);
  for (int i = 0; i < resolution; ++i) gs[i] = -omega + step * i;
  std::vector<std::uint8_t> cls(resolution);
  for (int row = 0; row < resolution; ++row) {
    const double gp = -omega + step * row;
    for (int i = 0; i < resolution; ++i) gps[i] = gp;
    kern.classify_cells(omega, gs.data(), gps.data(), resolution, cls.data());
    for (int i = 0; i < resolution; ++i) {
      PlaneCell& c = cells[static_cast<std::size_t>(row) * resolution + i];
      c.g = gs[i];
      c.gp = gp;
      c.cls = static_cast<AttackClass>(cls[i]);
    }
  }
  return cells;
}

AttackKind attack_kind_from_name(const std::string& name) {
  for (AttackKind kind : kAllAttackKinds)
    if (name == attack_kind_name(kind)) return kind;
  throw std::invalid_argument("unknown attack name: " + name);
}

const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::collective: return "collective";
    case AttackKind::sep_plus: return "sep-plus";
    case AttackKind::sep_minus: return "sep-minus";
    case AttackKind::sep_qcorr: return "sep-qcorr";
    case AttackKind::sep_pcorr: return "sep-pcorr";
    case AttackKind::epr_positive: return "epr-positive";
    case AttackKind::epr_negative: return "epr-negative";
  }
  throw std::invalid_argument("unknown attack kind");
}

const char* attack_class_name(AttackClass cls) {
  switch (cls) {
    case AttackClass::nonphysical: return "nonphysical";
    case AttackClass::separable: return "separable";
    case AttackClass::entangled: return "entangled";
  }
  throw std::invalid_argument("unknown attack class");
}

}  // namespace cvrelay
