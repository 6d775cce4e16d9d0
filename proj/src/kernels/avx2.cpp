#include <immintrin.h>

#include <algorithm>

#include "round_detail.hpp"

// AVX2 kernel variant: four rounds per pass, one per lane. Operation order
// mirrors the scalar routines exactly (fma chain over the 18 normals, plain
// adds for means, fma for second moments), so lane contents are bit-identical
// to the scalar kernels' striped accumulators.

namespace cvrelay {

namespace {

void accumulate_rounds_avx2(const double* coeffs, std::uint64_t seed,
                            std::uint64_t first_round, std::uint64_t n,
                            MomentAccumulator* acc, double* records_out) {
  __m256d lanes[kMomentCount];
  for (int k = 0; k < kMomentCount; ++k) lanes[k] = _mm256_loadu_pd(acc->lanes[k]);

  double normals[4][kNormalsPerRound];
  const std::uint64_t groups = n / 4;
  for (std::uint64_t grp = 0; grp < groups; ++grp) {
    const std::uint64_t t0 = grp * 4;
    for (int lane = 0; lane < 4; ++lane)
      fill_round_normals(seed, first_round + t0 + lane, normals[lane]);

    __m256d nvec[kNormalsPerRound];
    for (int k = 0; k < kNormalsPerRound; ++k)
      nvec[k] = _mm256_set_pd(normals[3][k], normals[2][k], normals[1][k], normals[0][k]);

    __m256d ch[kChannels];
    for (int row = 0; row < kChannels; ++row) {
      const double* c = coeffs + row * kNormalsPerRound;
      __m256d s = _mm256_setzero_pd();
      for (int k = 0; k < kNormalsPerRound; ++k)
        s = _mm256_fmadd_pd(_mm256_set1_pd(c[k]), nvec[k], s);
      ch[row] = s;
    }

    for (int i = 0; i < kChannels; ++i) lanes[i] = _mm256_add_pd(lanes[i], ch[i]);
    int idx = kChannels;
    for (int i = 0; i < kRecordChannels; ++i)
      for (int j = i; j < kRecordChannels; ++j, ++idx)
        lanes[idx] = _mm256_fmadd_pd(ch[i], ch[j], lanes[idx]);
    for (int k = 0; k < kInternalChannels; ++k, ++idx)
      lanes[idx] = _mm256_fmadd_pd(ch[kRecordChannels + k], ch[kRecordChannels + k], lanes[idx]);

    if (records_out != nullptr) {
      double tmp[4];
      for (int i = 0; i < kRecordChannels; ++i) {
        _mm256_storeu_pd(tmp, ch[i]);
        for (int lane = 0; lane < 4; ++lane)
          records_out[(t0 + lane) * kRecordChannels + i] = tmp[lane];
      }
    }
  }

  for (int k = 0; k < kMomentCount; ++k) _mm256_storeu_pd(acc->lanes[k], lanes[k]);

  // Tail rounds continue the same lane striping through the scalar routines.
  double tail_normals[kNormalsPerRound];
  double tail_ch[kChannels];
  for (std::uint64_t t = groups * 4; t < n; ++t) {
    fill_round_normals(seed, first_round + t, tail_normals);
    detail::round_channels(coeffs, tail_normals, tail_ch);
    detail::accumulate_channels(tail_ch, static_cast<int>(t % 4), *acc);
    if (records_out != nullptr)
      std::copy(tail_ch, tail_ch + kRecordChannels, records_out + t * kRecordChannels);
  }
  acc->count += n;
}

void classify_cells_avx2(double omega, const double* g, const double* gp, int n,
                         std::uint8_t* out) {
  const __m256d vomega = _mm256_set1_pd(omega);
  const __m256d vone = _mm256_set1_pd(1.0);
  const __m256d vtol = _mm256_set1_pd(1e-12);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d vgp = _mm256_loadu_pd(gp + i);
    const __m256d abs_g = _mm256_andnot_pd(sign_mask, vg);
    const __m256d abs_gp = _mm256_andnot_pd(sign_mask, vgp);
    const __m256d ggp = _mm256_mul_pd(vg, vgp);
    const __m256d omega_sq = _mm256_mul_pd(vomega, vomega);

    const __m256d within = _mm256_and_pd(_mm256_cmp_pd(abs_g, vomega, _CMP_LT_OQ),
                                         _mm256_cmp_pd(abs_gp, vomega, _CMP_LT_OQ));
    const __m256d sum_abs =
        _mm256_mul_pd(vomega, _mm256_andnot_pd(sign_mask, _mm256_add_pd(vg, vgp)));
    const __m256d phys_rhs = _mm256_add_pd(
        _mm256_sub_pd(_mm256_add_pd(omega_sq, ggp), vone), vtol);
    const __m256d physical =
        _mm256_and_pd(within, _mm256_cmp_pd(sum_abs, phys_rhs, _CMP_LE_OQ));

    const __m256d diff_abs =
        _mm256_mul_pd(vomega, _mm256_andnot_pd(sign_mask, _mm256_sub_pd(vg, vgp)));
    const __m256d sep_lhs = _mm256_sub_pd(_mm256_sub_pd(omega_sq, ggp), vone);
    const __m256d separable = _mm256_cmp_pd(sep_lhs, diff_abs, _CMP_GE_OQ);

    const int phys_mask = _mm256_movemask_pd(physical);
    const int sep_mask = _mm256_movemask_pd(separable);
    for (int lane = 0; lane < 4; ++lane) {
      const int bit = 1 << lane;
      out[i + lane] = (phys_mask & bit) == 0 ? 0 : ((sep_mask & bit) != 0 ? 1 : 2);
    }
  }
  for (; i < n; ++i) out[i] = detail::classify_cell(omega, g[i], gp[i]);
}

}  // namespace

namespace detail {

const SimKernels& avx2_kernels_impl() {
  static const SimKernels k{accumulate_rounds_avx2, classify_cells_avx2};
  return k;
}

}  // namespace detail

}  // namespace cvrelay
