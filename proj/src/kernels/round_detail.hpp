#pragma once

#include <cmath>
#include <cstdint>

#include "cvrelay/kernels.hpp"
#include "cvrelay/rng.hpp"

// Shared per-round scalar routines. The scalar kernels use them for every
// round; the AVX2 kernels use them for partial tail groups. Any change to the
// operation order here is an ABI break of the bit-exactness contract between
// kernel variants.

namespace cvrelay::detail {

inline void round_channels(const double* coeffs, const double* normals, double* ch) {
  for (int row = 0; row < kChannels; ++row) {
    const double* c = coeffs + row * kNormalsPerRound;
    double acc = 0.0;
    for (int k = 0; k < kNormalsPerRound; ++k) acc = std::fma(c[k], normals[k], acc);
    ch[row] = acc;
  }
}

inline void accumulate_channels(const double* ch, int lane, MomentAccumulator& acc) {
  for (int i = 0; i < kChannels; ++i) acc.lanes[i][lane] += ch[i];
  int idx = kChannels;
  for (int i = 0; i < kRecordChannels; ++i)
    for (int j = i; j < kRecordChannels; ++j, ++idx)
      acc.lanes[idx][lane] = std::fma(ch[i], ch[j], acc.lanes[idx][lane]);
  for (int k = 0; k < kInternalChannels; ++k, ++idx) {
    const double v = ch[kRecordChannels + k];
    acc.lanes[idx][lane] = std::fma(v, v, acc.lanes[idx][lane]);
  }
}

inline std::uint8_t classify_cell(double omega, double g, double gp) {
  const bool physical = std::fabs(g) < omega && std::fabs(gp) < omega &&
                        omega * std::fabs(g + gp) <= ((omega * omega + g * gp) - 1.0) + 1e-12;
  if (!physical) return 0;
  const bool separable = ((omega * omega - g * gp) - 1.0) >= omega * std::fabs(g - gp);
  return separable ? 1 : 2;
}

}  // namespace cvrelay::detail
