#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace nehari {

// Counter-based splittable generator: each draw applies the SplitMix64
// finalizer to key + gamma * counter, so a stream is fully determined by its
// key.  Child streams are derived from a label and an index, which lets
// multi-start batteries pre-split their randomness per task and stay
// reproducible under any thread schedule.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(mix(seed) ^ mix(stream ^ 0x9e3779b97f4a7c15ull))),
        counter_(0) {}

  SplitRng split(std::string_view label, std::uint64_t index = 0) const noexcept {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return SplitRng(key_, h ^ mix(index + 0x632be59bd9b4e019ull));
  }

  std::uint64_t next_u64() noexcept {
    return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }

  // Box-Muller with explicit counters; avoids the implementation-defined
  // sequences of std::normal_distribution.
  double normal() noexcept {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925287 * u2);
  }

  std::uint64_t below(std::uint64_t n) noexcept {
    return n == 0 ? 0 : next_u64() % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace nehari
