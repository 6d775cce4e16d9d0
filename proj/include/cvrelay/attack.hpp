#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cvrelay {

// Full specification of a symmetric two-mode Gaussian attack plus detector
// efficiencies: both links share transmissivity tau, Eve's ancillas share
// variance omega with quadrature correlations (g, gp).
struct AttackParams {
  double tau = 1.0;
  double omega = 1.0;
  double g = 0.0;
  double gp = 0.0;
  double eta = 1.0;
  double etap = 1.0;
};

// Effective q/p channel noises seen after the relay measurement.
struct NoisePair {
  double lambda = 0.0;
  double lambda_p = 0.0;
};

enum class AttackClass { nonphysical, separable, entangled };

enum class AttackKind {
  collective,
  sep_plus,
  sep_minus,
  sep_qcorr,
  sep_pcorr,
  epr_positive,
  epr_negative,
};

// True iff (omega, g, gp) is a physical ancilla state: |g| < omega, |gp| <
// omega, and omega*|g+gp| <= omega^2 + g*gp - 1 (the EPR boundary admitted
// with 1e-12 absolute tolerance). Throws for omega < 1.
bool validate(double omega, double g, double gp);

// True iff omega^2 - g*gp - 1 >= omega*|g - gp|. Throws for invalid triples.
bool is_separable(double omega, double g, double gp);

// Correlation pair of a named attack; every kind collapses to (0, 0) at
// omega = 1 (pure loss).
std::pair<double, double> named_attack(AttackKind kind, double omega);

NoisePair noise_params(const AttackParams& p);

// Throws std::invalid_argument unless tau in (0,1], eta/etap in (0,1], and
// (omega, g, gp) validates.
void check_params(const AttackParams& p);

struct PlaneCell {
  double g = 0.0;
  double gp = 0.0;
  AttackClass cls = AttackClass::nonphysical;
};

// Uniform resolution x resolution grid of nodes spanning [-omega, omega]^2
// with both endpoints included. Row-major with g varying fastest.
std::vector<PlaneCell> classify_plane(double omega, int resolution);

AttackKind attack_kind_from_name(const std::string& name);
const char* attack_kind_name(AttackKind kind);
const char* attack_class_name(AttackClass cls);

inline constexpr AttackKind kAllAttackKinds[] = {
    AttackKind::collective,  AttackKind::sep_plus,     AttackKind::sep_minus,
    AttackKind::sep_qcorr,   AttackKind::sep_pcorr,    AttackKind::epr_positive,
    AttackKind::epr_negative,
};

}  // namespace cvrelay
