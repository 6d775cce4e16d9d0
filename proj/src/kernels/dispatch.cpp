#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "cvrelay/kernels.hpp"

namespace cvrelay {

#if defined(CVRELAY_HAVE_AVX2)
namespace detail {
const SimKernels& avx2_kernels_impl();
}
#endif

const SimKernels* avx2_kernels() {
#if defined(CVRELAY_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &detail::avx2_kernels_impl();
#endif
  return nullptr;
}

namespace {

struct Selection {
  const SimKernels* kernels;
  const char* name;
};

Selection select_kernels() {
  const char* env = std::getenv("CVRELAY_SIMD");
  const char* mode = (env != nullptr && *env != '\0') ? env : "auto";
  if (std::strcmp(mode, "scalar") == 0) return {&scalar_kernels(), "scalar"};
  if (std::strcmp(mode, "avx2") == 0) {
    if (const SimKernels* k = avx2_kernels()) return {k, "avx2"};
    std::fprintf(stderr, "cvrelay: CVRELAY_SIMD=avx2 requested but AVX2 is unavailable; using scalar kernels\n");
    return {&scalar_kernels(), "scalar"};
  }
  if (std::strcmp(mode, "auto") == 0) {
    if (const SimKernels* k = avx2_kernels()) return {k, "avx2"};
    return {&scalar_kernels(), "scalar"};
  }
  throw std::invalid_argument("CVRELAY_SIMD must be auto, scalar, or avx2");
}

const Selection& selection() {
  static const Selection s = select_kernels();
  return s;
}

}  // namespace

const SimKernels& active_kernels() { return *selection().kernels; }

const char* active_kernel_name() { return selection().name; }

}  // namespace cvrelay
