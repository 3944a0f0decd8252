#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace tensorchan {

/// Counter-based 64-bit generator: output n is mix(key + n * golden), the
/// SplitMix64 construction. Streams are split by deriving new keys with
/// derive_seed(), so every (experiment, run, purpose) owns an independent,
/// individually reproducible stream.
///
/// Distributions are implemented here rather than taken from <random> because
/// the standard distributions are not specified bit-for-bit across library
/// implementations and exported datasets must be byte-reproducible.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n), unbiased.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal (Box-Muller, both variates used).
  double normal();
  /// Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0);

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t hash_tag(std::string_view tag);

/// Hash-combines a base seed with any number of integer components.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);
/// derive_seed(base, {parts..., hash_tag(purpose)}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts,
                          std::string_view purpose);

}  // namespace tensorchan
