#include "wavecs/dwt.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "wavecs/errors.hpp"

namespace wavecs {
namespace {

// One analysis step on data[0..n): approximation to out[0..n/2), detail to out[n/2..n).
void analysis_step(const double* in, double* out, std::size_t n, const WaveletSpec& spec) {
  const std::size_t half = n / 2;
  const int len = spec.length();
  const std::size_t mask = n - 1;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (int t = 0; t < len; ++t) {
      a += spec.h[static_cast<std::size_t>(t)] * in[(2 * k + static_cast<std::size_t>(t)) & mask];
      // g index i = 1 - t, position 2k + 1 - t (mod n)
      d += spec.highpass_tap(t) * in[(2 * k + 1 + n * static_cast<std::size_t>(len) - static_cast<std::size_t>(t)) & mask];
    }
    out[k] = a;
    out[half + k] = d;
  }
}

void synthesis_step(const double* in, double* out, std::size_t n, const WaveletSpec& spec) {
  const std::size_t half = n / 2;
  const int len = spec.length();
  const std::size_t mask = n - 1;
  std::fill(out, out + n, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = in[k];
    const double d = in[half + k];
    for (int t = 0; t < len; ++t) {
      out[(2 * k + static_cast<std::size_t>(t)) & mask] += spec.h[static_cast<std::size_t>(t)] * a;
      out[(2 * k + 1 + n * static_cast<std::size_t>(len) - static_cast<std::size_t>(t)) & mask] +=
          spec.highpass_tap(t) * d;
    }
  }
}

}  // namespace

int exact_log2(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw ShapeError("length " + std::to_string(n) + " is not a power of two");
  }
  return std::countr_zero(n);
}

void dwt_inplace(std::span<double> data, std::span<double> work, const WaveletSpec& spec) {
  const int J = exact_log2(data.size());
  if (J < spec.j0) {
    throw ShapeError("periodized_dwt: scale " + std::to_string(J) + " below coarsest scale " +
                     std::to_string(spec.j0));
  }
  for (int j = J; j > spec.j0; --j) {
    const std::size_t n = std::size_t{1} << j;
    analysis_step(data.data(), work.data(), n, spec);
    std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(n), data.begin());
  }
}

void idwt_inplace(std::span<double> data, std::span<double> work, const WaveletSpec& spec) {
  const int J = exact_log2(data.size());
  if (J < spec.j0) {
    throw ShapeError("periodized_idwt: length 2^" + std::to_string(J) + " shorter than 2^j0");
  }
  for (int j = spec.j0 + 1; j <= J; ++j) {
    const std::size_t n = std::size_t{1} << j;
    synthesis_step(data.data(), work.data(), n, spec);
    std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(n), data.begin());
  }
}

CoefficientVector periodized_dwt(std::span<const double> samples, const WaveletSpec& spec) {
  const int J = exact_log2(samples.size());
  if (J < spec.j0) {
    throw ShapeError("periodized_dwt: scale " + std::to_string(J) + " below coarsest scale " +
                     std::to_string(spec.j0));
  }
  CoefficientVector out;
  out.values.assign(samples.begin(), samples.end());
  out.j0 = spec.j0;
  out.r = J - spec.j0;
  std::vector<double> work(samples.size());
  dwt_inplace(out.values, work, spec);
  return out;
}

std::vector<double> periodized_idwt(const CoefficientVector& coeffs, const WaveletSpec& spec) {
  if (coeffs.j0 != spec.j0) throw ShapeError("periodized_idwt: coefficient j0 does not match wavelet");
  const int J = exact_log2(coeffs.size());
  if (J != coeffs.j0 + coeffs.r) throw ShapeError("periodized_idwt: length inconsistent with r");
  std::vector<double> out(coeffs.values);
  std::vector<double> work(out.size());
  idwt_inplace(out, work, spec);
  return out;
}

std::vector<double> synthesize_to_scale(std::span<const double> coeffs, const WaveletSpec& spec,
                                        int target_scale) {
  const int J = exact_log2(coeffs.size());
  if (J < spec.j0 || target_scale < J) throw ShapeError("synthesize_to_scale: bad target scale");
  std::vector<double> out(std::size_t{1} << target_scale, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), out.begin());
  std::vector<double> work(out.size());
  for (int j = spec.j0 + 1; j <= target_scale; ++j) {
    const std::size_t n = std::size_t{1} << j;
    synthesis_step(out.data(), work.data(), n, spec);
    std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(n), out.begin());
  }
  return out;
}

}  // namespace wavecs
