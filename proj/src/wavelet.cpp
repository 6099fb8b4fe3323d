#include "wavecs/wavelet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "wavecs/errors.hpp"
#include "wavecs/gramian.hpp"

namespace wavecs {
namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Multiply polynomial (ascending coefficients) by (x - root).
using cld = std::complex<long double>;

std::vector<cld> times_linear(const std::vector<cld>& poly, cld root) {
  std::vector<cld> out(poly.size() + 1, 0.0L);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out[i + 1] += poly[i];
    out[i] -= root * poly[i];
  }
  return out;
}

}  // namespace

double WaveletSpec::highpass_tap(int t) const {
  // g_{1-t} = (-1)^{1-t} h_t
  const double sign = ((1 - t) % 2 == 0) ? 1.0 : -1.0;
  return sign * h[static_cast<std::size_t>(t)];
}

double WaveletSpec::scaling_centroid() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) acc += static_cast<double>(k) * h[k];
  return acc / std::numbers::sqrt2;
}

std::vector<double> daubechies_filter(int p) {
  if (p < 1 || p > 10) {
    throw UnsupportedError("daubechies_filter: order p=" + std::to_string(p) +
                           " outside supported range 1..10");
  }
  if (p == 1) return {1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2};

  // Roots of P(y) = sum_{k<p} C(p-1+k, k) y^k via the companion matrix.
  const int deg = p - 1;
  std::vector<double> coeff(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) coeff[static_cast<std::size_t>(k)] = binomial(p - 1 + k, k);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeff[static_cast<std::size_t>(i)] / coeff.back();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  const Eigen::VectorXcd y_roots = solver.eigenvalues();

  // y = (2 - z - 1/z)/4; keep the z root inside the unit circle. Roots are
  // polished by Newton steps in extended precision first.
  std::vector<cld> poly{1.0L};
  for (int i = 0; i < deg; ++i) {
    cld y(y_roots(i).real(), y_roots(i).imag());
    for (int it = 0; it < 8; ++it) {
      cld val = 0.0L;
      cld der = 0.0L;
      for (int k = deg; k >= 0; --k) {
        der = der * y + val;
        val = val * y + static_cast<long double>(coeff[static_cast<std::size_t>(k)]);
      }
      if (std::abs(der) == 0.0L) break;
      y -= val / der;
    }
    const cld b = 1.0L - 2.0L * y;
    const cld disc = std::sqrt(b * b - 1.0L);
    cld z = b + disc;
    if (std::abs(z) > 1.0L) z = b - disc;
    poly = times_linear(poly, z);
  }
  for (int i = 0; i < p; ++i) poly = times_linear(poly, -1.0L);

  std::vector<long double> hl(poly.size());
  long double suml = 0.0L;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    hl[k] = poly[poly.size() - 1 - k].real();
    suml += hl[k];
  }
  std::vector<double> h(poly.size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = static_cast<double>(hl[k] * std::sqrt(2.0L) / suml);
  return h;
}

int coarsest_scale(int p) {
  if (p <= 1) return 0;
  return static_cast<int>(std::ceil(std::log2(2.0 * p) - 1e-12));
}

WaveletSpec daubechies_wavelet(int p, double q) {
  WaveletSpec spec;
  spec.p = p;
  spec.j0 = coarsest_scale(p);
  spec.h = daubechies_filter(p);
  spec.q = q;
  return spec;
}

WaveletSpec daubechies_wavelet(int p) {
  WaveletSpec spec = daubechies_wavelet(p, 0.0);
  if (p > 1) spec.q = estimate_smoothness_q(spec);
  return spec;
}

std::complex<double> lowpass_symbol(const WaveletSpec& spec, double w) {
  std::complex<double> acc = 0.0;
  for (int k = 0; k < spec.length(); ++k) acc += spec.h[static_cast<std::size_t>(k)] * std::polar(1.0, -k * w);
  return acc / std::numbers::sqrt2;
}

std::complex<double> highpass_symbol(const WaveletSpec& spec, double w) {
  std::complex<double> acc = 0.0;
  for (int t = 0; t < spec.length(); ++t) acc += spec.highpass_tap(t) * std::polar(1.0, -(1 - t) * w);
  return acc / std::numbers::sqrt2;
}

std::complex<double> scaling_hat(const WaveletSpec& spec, double w) {
  std::complex<double> acc = 1.0;
  double arg = w / 2.0;
  // Factors beyond |arg| < 1e-13 differ from 1 by less than rounding.
  while (std::abs(arg) > 1e-13) {
    acc *= lowpass_symbol(spec, arg);
    arg /= 2.0;
  }
  return acc;
}

std::complex<double> wavelet_hat(const WaveletSpec& spec, double w) {
  return highpass_symbol(spec, w / 2.0) * scaling_hat(spec, w / 2.0);
}

int parse_wavelet_order(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "haar") return 1;
  std::string digits = lower.rfind("db", 0) == 0 ? lower.substr(2) : lower;
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw UnsupportedError("unrecognised wavelet '" + text + "' (expected haar or dbP)");
  }
  const int p = std::stoi(digits);
  if (p < 1 || p > 10) throw UnsupportedError("wavelet order outside 1..10: " + text);
  return p;
}

}  // namespace wavecs
