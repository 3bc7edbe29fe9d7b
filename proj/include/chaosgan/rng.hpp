#pragma once

#include <cstdint>
#include <string_view>

namespace chaosgan {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derive an independent child seed from a parent seed and a stream index.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15ULL));
}

/// FNV-1a; used to turn labels into stream indices.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/**
 * Counter-based pseudorandom stream.
 *
 * Draw i is a pure function of (key, i), so any position can be reached in
 * O(1) and streams split without shared state. The `*_at` accessors read a
 * position without touching the cursor.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  std::uint64_t next_u64() noexcept { return u64_at(counter_++); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return uniform01_at(counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  /// Standard normal; consumes two counter positions.
  double normal() noexcept {
    const double g = normal_at(counter_);
    counter_ += 2;
    return g;
  }
  /// Unbiased integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t u64_at(std::uint64_t index) const noexcept {
    return mix64(key_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
  }
  double uniform01_at(std::uint64_t index) const noexcept {
    return static_cast<double>(u64_at(index) >> 11) * 0x1.0p-53;
  }
  /// Box-Muller cosine branch over positions (index, index + 1).
  double normal_at(std::uint64_t index) const noexcept;

  Rng split(std::uint64_t stream) const noexcept { return Rng(derive_seed(key_, stream)); }

  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace chaosgan
