#pragma once

#include <cmath>
#include <cstdint>

namespace oulab::rng {

// Counter-based random stream. Every variate is a pure function of the
// address (seed, stream, step, draw), so ensembles can draw in parallel and
// a restarted trajectory regenerates exactly the increments it would have
// seen. `stream` is the path index for solvers and the particle index for
// the SDE sampler.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t step, std::uint64_t draw) {
  std::uint64_t z = mix64(seed + 0x632be59bd9b4e019ull);
  z = mix64(z + stream);
  z = mix64(z + step);
  z = mix64(z + draw);
  return z;
}

// Uniform in (0, 1]; never returns 0 so log() below is safe.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter values.
inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t step, std::uint64_t draw) {
  const double u1 = uniform01(counter_bits(seed, stream, step, 2 * draw));
  const double u2 = uniform01(counter_bits(seed, stream, step, 2 * draw + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Uniform in [lo, hi).
inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t step, std::uint64_t draw,
                      double lo, double hi) {
  const double u =
      static_cast<double>(counter_bits(seed, stream, step, draw) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace oulab::rng
