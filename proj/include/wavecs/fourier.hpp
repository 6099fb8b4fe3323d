#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wavecs/function.hpp"

namespace wavecs {

/// Natural (1-based) indexing of the Fourier basis gamma_n(t) = e^{2 pi i n t}:
/// natural 2n-1 is frequency -(n-1), natural 2n is frequency +n.
struct FourierIndexMap {
  static long frequency(long natural);
  static long natural(long frequency);
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

/// <f, gamma_n> = int_0^1 f(t) e^{-2 pi i n t} dt by panel-wise Gauss-Legendre
/// quadrature with panels split at the breakpoints of f.
std::vector<std::complex<double>> fourier_coefficients(const PiecewiseFunction& f,
                                                       std::span<const long> frequencies);

/// Cached Fourier coefficients at every frequency with |natural index| <= N.
/// Evaluates f once on a shared quadrature grid fine enough for the highest
/// requested frequency.
class FourierSampleTable {
 public:
  FourierSampleTable(const PiecewiseFunction& f, long N);
  /// Value at natural index 1..N.
  [[nodiscard]] std::complex<double> at_natural(long natural) const;
  [[nodiscard]] long size() const { return static_cast<long>(values_.size()); }

 private:
  std::vector<std::complex<double>> values_;
};

}  // namespace wavecs
