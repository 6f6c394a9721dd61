#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace gaplab {

/// Deterministic RNG with explicit stream splitting.
///
/// State advances with the splitmix64 sequence. Streams for workers,
/// episodes and purposes are derived by hashing tags into a child seed, so
/// the draw order of one stream never depends on another. This is what makes
/// parallel rollouts reproduce the serial results bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller. Two uniforms per draw, no caching, so a
  /// stream's draw count is independent of call history. u1 is drawn on a
  /// half-ulp-shifted grid so it is never exactly 0 and log stays finite.
  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Child stream derived from the current state and a tag. Does not advance
  /// this stream.
  Rng child(std::uint64_t tag) const { return Rng(mix(state_, tag)); }

  Rng child(std::string_view tag) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : tag) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 0x100000001b3ULL;
    }
    return child(h);
  }

  Rng child(std::string_view tag, std::uint64_t a) const { return child(tag).child(a); }
  Rng child(std::string_view tag, std::uint64_t a, std::uint64_t b) const {
    return child(tag).child(a).child(b);
  }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace gaplab
