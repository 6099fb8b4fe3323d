#pragma once

#include <cstdint>
#include <initializer_list>

namespace wavecs {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive hash of several 64-bit words into one seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

/// Counter-based generator: the i-th output is a pure function of
/// (key, stream, i), so streams can be split without shared state.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Unbiased uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wavecs
