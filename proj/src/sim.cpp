#include "cvrelay/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cvrelay/parallel.hpp"

namespace cvrelay {

namespace {

constexpr std::uint64_t kChunkRounds = 4096;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;

void check_sim_config(const SimConfig& cfg) {
  check_params(cfg.params);
  if (!(cfg.mu > 1.0)) throw std::invalid_argument("simulation requires mu > 1");
  if (cfg.rounds < 1) throw std::invalid_argument("simulation requires rounds >= 1");
}

}  // namespace

std::array<double, kChannels * kNormalsPerRound> build_round_matrix(const SimConfig& cfg) {
  check_sim_config(cfg);
  const AttackParams& p = cfg.params;
  const double mu = cfg.mu;

  const double rmu = std::sqrt(mu);
  const double s = std::sqrt(mu * mu - 1.0);
  const double rt = std::sqrt(p.tau);
  const double rmt = std::sqrt(1.0 - p.tau);
  const double rw = std::sqrt(p.omega);
  const double cq = std::sqrt(p.omega * p.omega - p.g * p.g);
  const double cp = std::sqrt(p.omega * p.omega - p.gp * p.gp);

  std::array<double, kChannels * kNormalsPerRound> L{};
  auto row = [&L](int r) { return L.data() + r * kNormalsPerRound; };

  // Normal slots: 0-3 Alice's EPR pair (q then p), 4-7 Bob's, 8-9 Eve's q
  // ancillas, 10-11 Eve's p ancillas, 12-13 Bell detector vacua, 14-17
  // heterodyne vacua. Retained modes: q_a = rmu*n0, p_a = rmu*n2 (Bob: n4,
  // n6); transmitted modes carry the conjugate EPR correlations.

  // Heterodyne records (q + vac)/sqrt2, (p - vac)/sqrt2.
  row(0)[0] = rmu * kInvSqrt2;
  row(0)[14] = kInvSqrt2;
  row(1)[2] = rmu * kInvSqrt2;
  row(1)[15] = -kInvSqrt2;
  row(2)[4] = rmu * kInvSqrt2;
  row(2)[16] = kInvSqrt2;
  row(3)[6] = rmu * kInvSqrt2;
  row(3)[17] = -kInvSqrt2;

  // Relay inputs after the transmissivity-tau beam splitters; Eve's ancilla
  // pairs are drawn from the (omega, g) and (omega, gp) marginals by their
  // Cholesky factors.
  double* qa = row(6);
  qa[0] = rt * s / rmu;
  qa[1] = rt / rmu;
  qa[8] = rmt * rw;
  double* pa = row(7);
  pa[2] = -rt * s / rmu;
  pa[3] = rt / rmu;
  pa[10] = rmt * rw;
  double* qb = row(8);
  qb[4] = rt * s / rmu;
  qb[5] = rt / rmu;
  qb[8] = rmt * p.g / rw;
  qb[9] = rmt * cq / rw;
  double* pb = row(9);
  pb[6] = -rt * s / rmu;
  pb[7] = rt / rmu;
  pb[10] = rmt * p.gp / rw;
  pb[11] = rmt * cp / rw;

  // Bell outcome gamma = (q_- + i p_+)/sqrt2 behind the detector beam
  // splitters: gamma_q = sqrt(eta)(qA'-qB')/2 + sqrt((1-eta)/2) vac.
  const double rh = std::sqrt(p.eta);
  const double rhp = std::sqrt(p.etap);
  for (int k = 0; k < kNormalsPerRound; ++k) {
    row(4)[k] = rh * (qa[k] - qb[k]) / 2.0;
    row(5)[k] = rhp * (pa[k] + pb[k]) / 2.0;
  }
  row(4)[12] = std::sqrt((1.0 - p.eta) / 2.0);
  row(5)[13] = std::sqrt((1.0 - p.etap) / 2.0);

  return L;
}

std::array<double, kRecordChannels * kRecordChannels> analytic_record_covariance(
    const SimConfig& cfg) {
  const auto L = build_round_matrix(cfg);
  std::array<double, kRecordChannels * kRecordChannels> cov{};
  for (int i = 0; i < kRecordChannels; ++i)
    for (int j = 0; j < kRecordChannels; ++j) {
      double acc = 0.0;
      for (int k = 0; k < kNormalsPerRound; ++k)
        acc += L[i * kNormalsPerRound + k] * L[j * kNormalsPerRound + k];
      cov[static_cast<std::size_t>(i) * kRecordChannels + j] = acc;
    }
  return cov;
}

SampleBatch simulate(const SimConfig& cfg, std::ostream* dump) {
  check_sim_config(cfg);
  const auto L = build_round_matrix(cfg);
  const SimKernels& kern = active_kernels();

  const std::uint64_t n_chunks = (cfg.rounds + kChunkRounds - 1) / kChunkRounds;
  std::vector<MomentAccumulator> partials(n_chunks);

  auto chunk_span = [&](std::uint64_t c) {
    const std::uint64_t first = c * kChunkRounds;
    const std::uint64_t count = std::min(kChunkRounds, cfg.rounds - first);
    return std::pair<std::uint64_t, std::uint64_t>{first, count};
  };

  if (dump != nullptr) {
    // Streaming the raw records forces sequential chunk processing; the
    // accumulated moments are identical to the parallel path.
    *dump << "round,alpha_q,alpha_p,beta_q,beta_p,gamma_q,gamma_p\n";
    std::vector<double> records(kChunkRounds * kRecordChannels);
    char line[256];
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
      const auto [first, count] = chunk_span(c);
      kern.accumulate_rounds(L.data(), cfg.seed, first, count, &partials[c], records.data());
      for (std::uint64_t r = 0; r < count; ++r) {
        const double* rec = records.data() + r * kRecordChannels;
        std::snprintf(line, sizeof line,
                      "%llu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      static_cast<unsigned long long>(first + r), rec[0], rec[1], rec[2],
                      rec[3], rec[4], rec[5]);
        *dump << line;
      }
    }
    if (!dump->good()) throw std::ios_base::failure("failed writing sample dump");
  } else {
    parallel_for_indexed(n_chunks, [&](std::size_t c) {
      const auto [first, count] = chunk_span(c);
      kern.accumulate_rounds(L.data(), cfg.seed, first, count, &partials[c], nullptr);
    });
  }

  // Deterministic fold: chunk order, then the fixed lane collapse.
  MomentAccumulator total;
  for (const MomentAccumulator& part : partials) total.merge(part);

  SampleBatch batch;
  batch.cfg = cfg;
  batch.rounds = total.count;
  const double n = static_cast<double>(total.count);
  const double bessel = total.count > 1 ? n / (n - 1.0) : 1.0;

  double mean_all[kChannels];
  for (int i = 0; i < kChannels; ++i) mean_all[i] = total.total(i) / n;
  for (int i = 0; i < kRecordChannels; ++i) batch.mean[static_cast<std::size_t>(i)] = mean_all[i];

  for (int i = 0; i < kRecordChannels; ++i)
    for (int j = i; j < kRecordChannels; ++j) {
      const double raw = total.total(kChannels + record_pair_index(i, j)) / n;
      const double cov = (raw - mean_all[i] * mean_all[j]) * bessel;
      batch.cov[static_cast<std::size_t>(i) * kRecordChannels + j] = cov;
      batch.cov[static_cast<std::size_t>(j) * kRecordChannels + i] = cov;
    }
  for (int k = 0; k < kInternalChannels; ++k) {
    const double raw = total.total(kChannels + kRecordPairs + k) / n;
    const double m = mean_all[kRecordChannels + k];
    batch.internal_variance[static_cast<std::size_t>(k)] = (raw - m * m) * bessel;
  }
  return batch;
}

namespace {

void require_rounds(const SampleBatch& batch) {
  if (batch.rounds < 10000)
    throw std::invalid_argument("empirical estimates require at least 1e4 rounds");
}

// Residual covariance of the four record channels after regressing out
// (gamma_q, gamma_p).
std::array<double, 16> residual_covariance(const SampleBatch& batch) {
  const double g00 = batch.covariance(4, 4);
  const double g01 = batch.covariance(4, 5);
  const double g11 = batch.covariance(5, 5);
  const double det = g00 * g11 - g01 * g01;
  if (!(det > 0.0) || !(g00 > 0.0) || !(g11 > 0.0))
    throw std::runtime_error("degenerate relay-outcome covariance");
  const double i00 = g11 / det;
  const double i01 = -g01 / det;
  const double i11 = g00 / det;

  std::array<double, 16> r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double ci0 = batch.covariance(i, 4);
      const double ci1 = batch.covariance(i, 5);
      const double cj0 = batch.covariance(j, 4);
      const double cj1 = batch.covariance(j, 5);
      const double proj = ci0 * (i00 * cj0 + i01 * cj1) + ci1 * (i01 * cj0 + i11 * cj1);
      r[static_cast<std::size_t>(i) * 4 + j] = batch.covariance(i, j) - proj;
    }
  return r;
}

double det4(const std::array<double, 16>& m) {
  double a[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m[static_cast<std::size_t>(i) * 4 + j];
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = 0; j < 4; ++j) std::swap(a[pivot][j], a[col][j]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int j = col; j < 4; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return det;
}

}  // namespace

ConditionalCmEstimate empirical_conditional_cm(const SampleBatch& batch) {
  require_rounds(batch);
  const std::array<double, 16> r = residual_covariance(batch);
  ConditionalCmEstimate est;
  est.value = r;
  const double n = static_cast<double>(batch.rounds);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double rii = r[static_cast<std::size_t>(i) * 4 + i];
      const double rjj = r[static_cast<std::size_t>(j) * 4 + j];
      const double rij = r[static_cast<std::size_t>(i) * 4 + j];
      est.se[static_cast<std::size_t>(i) * 4 + j] = std::sqrt((rii * rjj + rij * rij) / n);
    }
  return est;
}

MutualInformationEstimate empirical_mutual_information(const SampleBatch& batch) {
  require_rounds(batch);
  const double n = static_cast<double>(batch.rounds);
  constexpr double kLn2 = 0.6931471805599453094172321;
  MutualInformationEstimate est;

  {
    const std::array<double, 16> r = residual_covariance(batch);
    const double det_a = r[0] * r[5] - r[1] * r[4];
    const double det_b = r[10] * r[15] - r[11] * r[14];
    const double det_full = det4(r);
    if (!(det_full > 0.0) || !(det_a > 0.0) || !(det_b > 0.0))
      throw std::runtime_error("degenerate residual covariance");
    est.ab_given_gamma = 0.5 * std::log2(det_a * det_b / det_full);
    const double rho_q = r[2] / std::sqrt(r[0] * r[10]);
    const double rho_p = r[7] / std::sqrt(r[5] * r[15]);
    est.ab_se = std::sqrt(rho_q * rho_q + rho_p * rho_p) / (std::sqrt(n) * kLn2);
  }
  {
    // Unconditional I(alpha; gamma) from the (alpha_q, alpha_p, gamma_q,
    // gamma_p) covariance.
    std::array<double, 16> c{};
    const int sel[4] = {0, 1, 4, 5};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        c[static_cast<std::size_t>(i) * 4 + j] = batch.covariance(sel[i], sel[j]);
    const double det_a = c[0] * c[5] - c[1] * c[4];
    const double det_g = c[10] * c[15] - c[11] * c[14];
    const double det_full = det4(c);
    if (!(det_full > 0.0) || !(det_a > 0.0) || !(det_g > 0.0))
      throw std::runtime_error("degenerate record covariance");
    est.alpha_gamma = 0.5 * std::log2(det_a * det_g / det_full);
    const double rho_q = c[2] / std::sqrt(c[0] * c[10]);
    const double rho_p = c[7] / std::sqrt(c[5] * c[15]);
    est.alpha_gamma_se = std::sqrt(rho_q * rho_q + rho_p * rho_p) / (std::sqrt(n) * kLn2);
  }
  return est;
}

double gaussian_pair_mi(const std::array<double, kRecordChannels * kRecordChannels>& cov, int a0,
                        int a1, int b0, int b1) {
  const auto entry = [&cov](int i, int j) {
    return cov[static_cast<std::size_t>(i) * kRecordChannels + j];
  };
  const int sel[4] = {a0, a1, b0, b1};
  std::array<double, 16> c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[static_cast<std::size_t>(i) * 4 + j] = entry(sel[i], sel[j]);
  const double det_a = c[0] * c[5] - c[1] * c[4];
  const double det_b = c[10] * c[15] - c[11] * c[14];
  const double det_full = det4(c);
  if (!(det_full > 0.0) || !(det_a > 0.0) || !(det_b > 0.0))
    throw std::runtime_error("degenerate covariance in pair mutual information");
  return 0.5 * std::log2(det_a * det_b / det_full);
}

CorrelationEstimate relay_difference_correlation(const SampleBatch& batch) {
  require_rounds(batch);
  CorrelationEstimate est;
  const double var_dq = batch.covariance(0, 0) + batch.covariance(2, 2) - 2.0 * batch.covariance(0, 2);
  const double cov_q = batch.covariance(4, 0) - batch.covariance(4, 2);
  est.corr_q = cov_q / std::sqrt(batch.covariance(4, 4) * var_dq);
  const double var_sp = batch.covariance(1, 1) + batch.covariance(3, 3) + 2.0 * batch.covariance(1, 3);
  const double cov_p = batch.covariance(5, 1) + batch.covariance(5, 3);
  est.corr_p = cov_p / std::sqrt(batch.covariance(5, 5) * var_sp);
  est.fisher_se = 1.0 / std::sqrt(static_cast<double>(batch.rounds) - 3.0);
  return est;
}

}  // namespace cvrelay
