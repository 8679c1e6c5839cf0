#pragma once

#include <cstdint>
#include <random>

#include "rmt/types.hpp"

namespace rmt {

// One Monte Carlo trial = one stream. (seed, stream) fully determines every
// draw, so trials can be farmed out to threads in any order.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic engine for a single stream. Gaussians come from Box-Muller on
// explicit 53-bit uniforms rather than std::normal_distribution, whose
// algorithm is implementation-defined and would tie outputs to a particular
// standard library.
class Rng {
 public:
  explicit Rng(RngStream s) {
    std::uint64_t state = detail::mix64(detail::mix64(s.seed) ^ detail::mix64(~s.stream));
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
      const std::uint64_t v = detail::mix64(state += 0x9e3779b97f4a7c15ull);
      words[2 * i] = static_cast<std::uint32_t>(v);
      words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words, words + 8);
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, bound).
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // Standard normal.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmt
