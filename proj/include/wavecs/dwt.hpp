#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wavecs/wavelet.hpp"

namespace wavecs {

/// Wavelet coefficients in the canonical ordering: entries [0, 2^j0) are the
/// scaling coefficients at scale j0, entries [2^j, 2^{j+1}) the wavelet
/// coefficients at scale j, for j = j0..j0+r-1.
struct CoefficientVector {
  std::vector<double> values;
  int j0 = 0;
  int r = 0;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  /// Finest resolution 2^{j0+r}.
  [[nodiscard]] int resolution_scale() const { return j0 + r; }
};

/// Integer log2 of a power of two; throws ShapeError otherwise.
int exact_log2(std::size_t n);

/// Periodic filter-bank analysis from scale J = log2(len) down to spec.j0.
CoefficientVector periodized_dwt(std::span<const double> samples, const WaveletSpec& spec);

/// Inverse of `periodized_dwt`.
std::vector<double> periodized_idwt(const CoefficientVector& coeffs, const WaveletSpec& spec);

/// Synthesis of canonical-order coefficients (length 2^{j0+r}) to the scaling
/// coefficients at a finer scale `target_scale` >= j0+r; the missing finer
/// wavelet coefficients are taken as zero.
std::vector<double> synthesize_to_scale(std::span<const double> coeffs, const WaveletSpec& spec,
                                        int target_scale);

/// In-place analysis/synthesis on a buffer holding canonical-order data.
/// `work` must be at least as long as `data`.
void dwt_inplace(std::span<double> data, std::span<double> work, const WaveletSpec& spec);
void idwt_inplace(std::span<double> data, std::span<double> work, const WaveletSpec& spec);

}  // namespace wavecs
