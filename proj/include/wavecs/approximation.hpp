#pragma once

#include <span>
#include <vector>

#include "wavecs/dwt.hpp"
#include "wavecs/function.hpp"

namespace wavecs {

/// Linear (first-s) approximation error: l2 norm of entries s.. of d.
double linear_error(std::span<const double> d, std::size_t s);

/// Best s-term error: l2 norm of everything except the s largest magnitudes.
/// Ties keep the smaller index.
double best_s_term_error(std::span<const double> d, std::size_t s);

/// Indices of the s largest-magnitude entries, ties broken towards smaller index.
std::vector<std::size_t> largest_entries(std::span<const double> d, std::size_t s);

/// Per-scale maxima of |coefficient| split by whether the basis function's
/// support contains a breakpoint of the periodic extension of f.
struct DecayProfile {
  std::vector<int> scales;
  std::vector<double> hit_max;
  std::vector<double> miss_max;
  std::vector<std::size_t> hit_count;
  std::vector<std::size_t> miss_count;
};

/// Scales run over the wavelet scales j0..j0+r-1 (scaling coefficients are excluded).
DecayProfile decay_profile(const CoefficientVector& d, const PiecewiseFunction& f, const WaveletSpec& spec);

/// True when the periodized support of psi_{j,n} contains one of `breakpoints` in its interior.
bool wavelet_support_hits(int j, long n, int p, std::span<const double> breakpoints);

}  // namespace wavecs
