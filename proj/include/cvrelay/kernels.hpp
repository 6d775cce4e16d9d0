#pragma once

#include <cstdint>

namespace cvrelay {

// Channels produced per simulation round by the linear phase-space transform:
// six recorded observables followed by four relay-input quadratures whose
// marginal statistics the tests check against theory.
inline constexpr int kRecordChannels = 6;   // alpha_q, alpha_p, beta_q, beta_p, gamma_q, gamma_p
inline constexpr int kInternalChannels = 4; // qA', pA', qB', pB'
inline constexpr int kChannels = kRecordChannels + kInternalChannels;
inline constexpr int kRecordPairs = kRecordChannels * (kRecordChannels + 1) / 2;
inline constexpr int kMomentCount = kChannels + kRecordPairs + kInternalChannels;

// Flat index of the (i, j) record second moment, i <= j < kRecordChannels.
inline constexpr int record_pair_index(int i, int j) {
  return i * kRecordChannels - i * (i + 1) / 2 + j;
}

// Four-lane striped sums: round r of a chunk accumulates into lane r % 4.
// Both kernel variants produce bit-identical lane contents; lanes are only
// collapsed at finalization time, in a fixed order.
struct MomentAccumulator {
  double lanes[kMomentCount][4] = {};
  std::uint64_t count = 0;

  void merge(const MomentAccumulator& other) {
    for (int k = 0; k < kMomentCount; ++k)
      for (int lane = 0; lane < 4; ++lane) lanes[k][lane] += other.lanes[k][lane];
    count += other.count;
  }

  double total(int k) const {
    return (lanes[k][0] + lanes[k][2]) + (lanes[k][1] + lanes[k][3]);
  }
};

struct SimKernels {
  // Processes rounds [first_round, first_round + n): generates the round's 18
  // standard normals from the counter RNG, applies the 10x18 coefficient
  // matrix rows (fma chain over the 18 normals, fixed order), and accumulates
  // means, record pair products, and internal squares. When records_out is
  // non-null it additionally receives kRecordChannels doubles per round.
  void (*accumulate_rounds)(const double* coeffs, std::uint64_t seed,
                            std::uint64_t first_round, std::uint64_t n,
                            MomentAccumulator* acc, double* records_out);
  // Classifies correlation-plane cells: 0 nonphysical, 1 separable, 2 entangled.
  void (*classify_cells)(double omega, const double* g, const double* gp, int n,
                         std::uint8_t* out);
};

// Kernel set selected at runtime from CPU support, overridable through
// CVRELAY_SIMD=auto|scalar|avx2.
const SimKernels& active_kernels();
const char* active_kernel_name();

const SimKernels& scalar_kernels();
// Null when the binary or CPU lacks AVX2 support.
const SimKernels* avx2_kernels();

}  // namespace cvrelay
