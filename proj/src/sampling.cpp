#include "wavecs/sampling.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "wavecs/errors.hpp"
#include "wavecs/fourier.hpp"
#include "wavecs/rng.hpp"

namespace wavecs {

long LevelScheme::level_begin(int k) const {
  if (k < 1 || k > levels()) throw PreconditionError("LevelScheme: level out of range");
  return k == 1 ? 0 : level_ends[static_cast<std::size_t>(k - 2)];
}

long LevelScheme::level_size(int k) const { return level_ends[static_cast<std::size_t>(k - 1)] - level_begin(k); }

long LevelScheme::total() const {
  long t = 0;
  for (long m : m_local) t += m;
  return t;
}

bool LevelScheme::saturated(int k) const {
  return k <= saturation || m_local[static_cast<std::size_t>(k - 1)] == level_size(k);
}

void LevelScheme::validate() const {
  if (level_ends.empty()) throw PreconditionError("LevelScheme: no levels");
  if (m_local.size() != level_ends.size()) throw ShapeError("LevelScheme: m_local and level_ends differ in length");
  if (saturation < 0 || saturation > levels()) throw PreconditionError("LevelScheme: saturation out of range");
  long prev = 0;
  for (int k = 1; k <= levels(); ++k) {
    const long end = level_ends[static_cast<std::size_t>(k - 1)];
    if (end <= prev) throw PreconditionError("LevelScheme: level ends must be strictly increasing");
    prev = end;
    const long mk = m_local[static_cast<std::size_t>(k - 1)];
    const long size = level_size(k);
    if (mk < 0) throw PreconditionError("LevelScheme: negative local count");
    if (k <= saturation && mk != size) {
      throw PreconditionError("LevelScheme: saturated level " + std::to_string(k) + " needs m_k = level size");
    }
    if (k > saturation) {
      if (mk > size) throw PreconditionError("LevelScheme: m_" + std::to_string(k) + " exceeds level size");
      if (strict && mk == size) {
        throw PreconditionError("LevelScheme: m_" + std::to_string(k) + " must be below the level size");
      }
    }
  }
}

LevelScheme dyadic_scheme(int j0, std::vector<long> m_local, int saturation, bool strict) {
  LevelScheme s;
  for (std::size_t k = 1; k <= m_local.size(); ++k) s.level_ends.push_back(1L << (j0 + static_cast<int>(k)));
  s.m_local = std::move(m_local);
  s.saturation = saturation;
  s.strict = strict;
  s.validate();
  return s;
}

long SamplingPattern::count(int k) const {
  long c = 0;
  for (int l : levels) c += l == k ? 1 : 0;
  return c;
}

namespace {

void append_full(SamplingPattern& out, int k) {
  for (long i = out.scheme.level_begin(k) + 1; i <= out.scheme.level_ends[static_cast<std::size_t>(k - 1)]; ++i) {
    out.naturals.push_back(i);
    out.levels.push_back(k);
  }
}

}  // namespace

SamplingPattern draw_multilevel(const LevelScheme& scheme, std::uint64_t seed) {
  scheme.validate();
  SamplingPattern out;
  out.scheme = scheme;
  out.seed = seed;
  for (int k = 1; k <= scheme.levels(); ++k) {
    if (scheme.saturated(k)) {
      append_full(out, k);
      continue;
    }
    CounterRng rng(seed, static_cast<std::uint64_t>(k));
    const long begin = scheme.level_begin(k);
    const auto size = static_cast<std::uint64_t>(scheme.level_size(k));
    for (long i = 0; i < scheme.m_local[static_cast<std::size_t>(k - 1)]; ++i) {
      out.naturals.push_back(begin + 1 + static_cast<long>(rng.uniform_index(size)));
      out.levels.push_back(k);
    }
  }
  return out;
}

SamplingPattern draw_symmetric(const LevelScheme& scheme, std::uint64_t seed) {
  scheme.validate();
  SamplingPattern out;
  out.scheme = scheme;
  out.seed = seed;
  for (int k = 1; k <= scheme.levels(); ++k) {
    if (scheme.saturated(k)) {
      append_full(out, k);
      continue;
    }
    const long mk = scheme.m_local[static_cast<std::size_t>(k - 1)];
    if (mk % 2 != 0) throw PreconditionError("draw_symmetric: m_" + std::to_string(k) + " must be even");
    // Level k in natural order alternates negative / positive frequencies, so
    // the positive half-band is {w_lo+1, ..., w_lo+size/2}.
    const long begin = scheme.level_begin(k);
    const long half = scheme.level_size(k) / 2;
    const long w_lo = FourierIndexMap::frequency(begin + 1) > 0 ? FourierIndexMap::frequency(begin + 1) - 1
                                                                 : FourierIndexMap::frequency(begin + 2) - 1;
    CounterRng rng(seed, static_cast<std::uint64_t>(k));
    for (long i = 0; i < mk / 2; ++i) {
      const long w = w_lo + 1 + static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(half)));
      out.naturals.push_back(FourierIndexMap::natural(w));
      out.levels.push_back(k);
      out.naturals.push_back(FourierIndexMap::natural(1 - w));
      out.levels.push_back(k);
    }
  }
  return out;
}

SamplingPattern deduplicate(const SamplingPattern& pattern) {
  SamplingPattern out;
  out.scheme = pattern.scheme;
  out.seed = pattern.seed;
  std::set<long> seen;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (seen.insert(pattern.naturals[i]).second) {
      out.naturals.push_back(pattern.naturals[i]);
      out.levels.push_back(pattern.levels[i]);
    }
  }
  return out;
}

std::vector<double> scaling_weights(const LevelScheme& scheme, long length) {
  std::vector<double> d(static_cast<std::size_t>(std::max(0L, length)), 0.0);
  for (int k = 1; k <= scheme.levels(); ++k) {
    const long mk = scheme.m_local[static_cast<std::size_t>(k - 1)];
    const double v = mk > 0 ? std::sqrt(static_cast<double>(scheme.level_size(k)) / static_cast<double>(mk)) : 0.0;
    const long lo = scheme.level_begin(k) + 1;
    const long hi = std::min(length, scheme.level_ends[static_cast<std::size_t>(k - 1)]);
    for (long i = lo; i <= hi; ++i) d[static_cast<std::size_t>(i - 1)] = v;
  }
  return d;
}

void write_pattern_csv(std::ostream& out, const SamplingPattern& pattern) {
  std::map<long, std::pair<int, long>> counts;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    auto& entry = counts[pattern.naturals[i]];
    entry.first = pattern.levels[i];
    ++entry.second;
  }
  out << "level,signed_frequency,natural_index,multiplicity\n";
  for (const auto& [natural, lc] : counts) {
    out << lc.first << ',' << FourierIndexMap::frequency(natural) << ',' << natural << ',' << lc.second << '\n';
  }
}

std::string pattern_summary(const SamplingPattern& pattern) {
  std::ostringstream s;
  s << "m_per_level=";
  for (int k = 1; k <= pattern.scheme.levels(); ++k) s << (k > 1 ? ";" : "") << pattern.count(k);
  s << " total=" << pattern.size() << " saturation=" << pattern.scheme.saturation << " seed=" << pattern.seed;
  return s.str();
}

}  // namespace wavecs
