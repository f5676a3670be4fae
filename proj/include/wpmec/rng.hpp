#pragma once

#include <cstdint>
#include <random>

namespace wpmec {

// std::uniform_real_distribution is implementation-defined, so the mapping
// from engine output to doubles is done by hand to keep runs reproducible
// across standard libraries. The engine itself (mt19937_64) is fully
// specified by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool coin() { return (engine_() & 1u) != 0; }

 private:
  std::mt19937_64 engine_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

// Stable derivation of sub-stream seeds from a master seed and two tags.
// Tag-based (not index-based), so extending a sweep never reshuffles the
// randomness of existing points.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = detail::splitmix64(seed ^ detail::splitmix64(a));
  return detail::splitmix64(s ^ detail::splitmix64(b));
}

}  // namespace wpmec
