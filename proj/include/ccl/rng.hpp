#ifndef CCL_RNG_HPP
#define CCL_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ccl {

// splitmix64 finalizer (Vigna / Steele et al.)
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Order-sensitive combine for deriving per-draw seeds from
// (seed, provenance, draw index) style tuples.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b), c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
  return mix64(mix64(a, b, c), d);
}

// Small deterministic generator. The output sequence is fully defined by the
// seed and is identical on every platform, unlike the std:: distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1) with 53 random bits
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // i in [0, n), n > 0
  std::uint64_t below(std::uint64_t n) {
    // multiply-shift; bias is negligible for the n used here
    return std::uint64_t((__uint128_t(next_u64()) * n) >> 64);
  }

  // Box-Muller, cosine branch only; consumes two uniforms per call
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace ccl

#endif  // CCL_RNG_HPP
