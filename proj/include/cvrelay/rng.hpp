#pragma once

#include <cmath>
#include <cstdint>

namespace cvrelay {

// Counter-based generator: word i of a stream is a pure function of (seed, i),
// so any round's random inputs can be produced without generating its
// predecessors. That is what makes chunked parallel simulation deterministic
// independent of thread count.
inline std::uint64_t rng_mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t index) {
  return rng_mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

inline constexpr int kNormalsPerRound = 18;

// Standard normal draws for one simulation round via Box-Muller on
// consecutive counter words; uses exactly kNormalsPerRound words.
inline void fill_round_normals(std::uint64_t seed, std::uint64_t round, double* out) {
  constexpr double kTwoPi = 6.283185307179586476925287;
  const std::uint64_t base = round * kNormalsPerRound;
  for (int k = 0; k < kNormalsPerRound / 2; ++k) {
    const std::uint64_t w1 = rng_word(seed, base + 2 * k);
    const std::uint64_t w2 = rng_word(seed, base + 2 * k + 1);
    const double u1 = static_cast<double>((w1 >> 11) + 1) * 0x1p-53;  // (0, 1]
    const double u2 = static_cast<double>(w2 >> 11) * 0x1p-53;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[2 * k] = r * std::cos(kTwoPi * u2);
    out[2 * k + 1] = r * std::sin(kTwoPi * u2);
  }
}

}  // namespace cvrelay
