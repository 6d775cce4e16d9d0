#include <algorithm>

#include "round_detail.hpp"

namespace cvrelay {

namespace {

void accumulate_rounds_scalar(const double* coeffs, std::uint64_t seed,
                              std::uint64_t first_round, std::uint64_t n,
                              MomentAccumulator* acc, double* records_out) {
  double normals[kNormalsPerRound];
  double ch[kChannels];
  for (std::uint64_t t = 0; t < n; ++t) {
    fill_round_normals(seed, first_round + t, normals);
    detail::round_channels(coeffs, normals, ch);
    detail::accumulate_channels(ch, static_cast<int>(t % 4), *acc);
    if (records_out != nullptr)
      std::copy(ch, ch + kRecordChannels, records_out + t * kRecordChannels);
  }
  acc->count += n;
}

void classify_cells_scalar(double omega, const double* g, const double* gp, int n,
                           std::uint8_t* out) {
  for (int i = 0; i < n; ++i) out[i] = detail::classify_cell(omega, g[i], gp[i]);
}

}  // namespace

const SimKernels& scalar_kernels() {
  static const SimKernels k{accumulate_rounds_scalar, classify_cells_scalar};
  return k;
}

}  // namespace cvrelay
