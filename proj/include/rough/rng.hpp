#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rough {

// Counter-based generator: every draw is a pure function of (key, counter),
// so replica streams can be opened at any point without sequencing and the
// results do not depend on scheduling.  The mixer is the splitmix64
// finalizer applied twice, which is enough to decorrelate neighbouring
// counters and keys.

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent stream key from a global seed and textual labels
/// (module, experiment) plus a replica index.
inline std::uint64_t derive_key(std::uint64_t seed, std::string_view label,
                                std::uint64_t replica = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return detail::mix64(detail::mix64(seed ^ h) + replica);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  std::uint64_t next_u64() {
    return detail::mix64(key_ ^ detail::mix64(counter_++));
  }

  /// Uniform on (0, 1); never returns an endpoint.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  /// Standard normal via Box-Muller (both variates used, cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 6.283185307179586476925286766559 * v;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  double exponential() { return -std::log(uniform()); }

  /// Poisson draw: Knuth's product method for small means, a clamped
  /// normal approximation for large ones (where the downstream use is a
  /// CLT-level aggregate anyway).
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 50.0) {
      const double limit = std::exp(-mean);
      std::uint64_t n = 0;
      double prod = uniform();
      while (prod > limit) {
        ++n;
        prod *= uniform();
      }
      return n;
    }
    const double draw = mean + std::sqrt(mean) * normal();
    return draw <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(draw));
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace rough
