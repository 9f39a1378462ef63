// Counter-based random numbers (Philox4x32-10). Every draw is a pure
// function of (seed, stream, indices), so path, time and subsimulation
// slices can be generated independently and in parallel with identical
// results for any worker count.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <array>
#include <cstdint>

namespace csws {

namespace rng {

struct Counter {
  std::uint32_t x0 = 0, x1 = 0, x2 = 0, x3 = 0;
};

// One Philox4x32 block, 10 rounds (Salmon et al. reference constants).
std::array<std::uint32_t, 4> philox4x32(Counter ctr, std::uint64_t key);

// Strictly inside (0, 1).
double uniform01(Counter ctr, std::uint64_t key);

// Standard normal via the inverse CDF; monotone in the underlying uniform.
double normal(Counter ctr, std::uint64_t key);

// Stream tags keep the draw spaces of unrelated consumers disjoint.
enum Stream : std::uint32_t {
  kAtoms = 1,     // monte_carlo_sampling atoms:  (draw, 0, 0)
  kPath = 2,      // path disturbances:           (draw, time, 0)
  kSubsim = 3,    // subsimulation disturbances:  (draw, path, time)
  kPosition = 4,  // stochastic position moves:   (path, time, 0)
};

inline double normal(std::uint64_t seed, Stream stream, std::uint32_t i0,
                     std::uint32_t i1 = 0, std::uint32_t i2 = 0) {
  return normal(Counter{i0, i1, i2, stream}, seed);
}

inline double uniform01(std::uint64_t seed, Stream stream, std::uint32_t i0,
                        std::uint32_t i1 = 0, std::uint32_t i2 = 0) {
  return uniform01(Counter{i0, i1, i2, stream}, seed);
}

}  // namespace rng

}  // namespace csws
