#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wavecs {

/// Multilevel scheme over natural Fourier indices: level k covers
/// {N_{k-1}+1, ..., N_k} (N_0 = 0) and receives m_k samples. Levels
/// 1..saturation are sampled fully.
struct LevelScheme {
  std::vector<long> level_ends;  // N_1 < ... < N_r
  std::vector<long> m_local;     // m_1..m_r
  int saturation = 0;            // r~
  bool strict = true;            // theory mode: m_k < level size above saturation

  [[nodiscard]] int levels() const { return static_cast<int>(level_ends.size()); }
  [[nodiscard]] long level_begin(int k) const;  // N_{k-1}, 1-based k
  [[nodiscard]] long level_size(int k) const;   // N_k - N_{k-1}
  [[nodiscard]] long total() const;
  /// True when level k is enumerated in full: k <= saturation or m_k equals the level size.
  [[nodiscard]] bool saturated(int k) const;
  /// Throws PreconditionError when an invariant fails.
  void validate() const;
};

/// Dyadic scheme N_k = 2^{j0+k}, k = 1..r, with the given local counts.
LevelScheme dyadic_scheme(int j0, std::vector<long> m_local, int saturation, bool strict);

struct SamplingPattern {
  std::vector<long> naturals;  // with multiplicity, grouped by level
  std::vector<int> levels;     // 1-based level of each entry
  LevelScheme scheme;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return naturals.size(); }
  /// Number of entries in level k (1-based).
  [[nodiscard]] long count(int k) const;
};

/// Saturated levels listed once each; other levels get m_k i.i.d. uniform
/// draws with replacement. Level k uses its own random stream.
SamplingPattern draw_multilevel(const LevelScheme& scheme, std::uint64_t seed);

/// As `draw_multilevel` but each unsaturated level draws m_k/2 frequencies
/// from its positive half-band and adds the mirrored partner 1 - w.
SamplingPattern draw_symmetric(const LevelScheme& scheme, std::uint64_t seed);

/// Drops repeated indices (keeps first occurrence).
SamplingPattern deduplicate(const SamplingPattern& pattern);

/// D_ii = sqrt((N_k - N_{k-1}) / m_k) for N_{k-1} < i <= N_k; zero beyond
/// N_r and for levels with m_k = 0. Element i-1 holds D_ii, i = 1..length.
std::vector<double> scaling_weights(const LevelScheme& scheme, long length);

/// CSV rows `level,signed_frequency,natural_index,multiplicity` (sorted by
/// natural index) preceded by the header.
void write_pattern_csv(std::ostream& out, const SamplingPattern& pattern);

/// One line: m per level, total, saturation and seed.
std::string pattern_summary(const SamplingPattern& pattern);

}  // namespace wavecs
