#pragma once

#include <cmath>
#include <cstdint>

namespace kcsep {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th output is mix64(key + k * gamma).
/// Streams for different (seed, index) pairs are derived by hashing, so any
/// realization can be replayed without generating the others.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Exponential with the given rate (> 0).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed of realization `index` under a master seed.
inline std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed + mix64(index ^ 0xd1b54a32d192ed03ULL));
}

}  // namespace kcsep
