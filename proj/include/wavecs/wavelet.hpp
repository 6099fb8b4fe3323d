#pragma once

#include <complex>
#include <string>
#include <vector>

namespace wavecs {

/// Daubechies wavelet with `p` vanishing moments, periodized on [0,1].
///
/// The low-pass taps `h` satisfy phi(x) = sqrt(2) sum_k h_k phi(2x - k) with
/// phi supported on [0, 2p-1]. The high-pass taps are g_k = (-1)^k h_{1-k},
/// k = 2-2p..1, so psi is supported on [-p+1, p].
struct WaveletSpec {
  int p = 1;
  int j0 = 0;
  std::vector<double> h;
  double q = 0.0;

  /// Filter length 2p.
  [[nodiscard]] int length() const { return static_cast<int>(h.size()); }
  /// g_k for k = 1-t, t = 0..2p-1, i.e. element t is g_{1-t}.
  [[nodiscard]] double highpass_tap(int t) const;
  /// First moment of the scaling function, integral of x phi(x).
  [[nodiscard]] double scaling_centroid() const;
  [[nodiscard]] std::string name() const { return "db" + std::to_string(p); }
};

/// Minimal-phase Daubechies low-pass filter, taps summing to sqrt(2).
/// Throws UnsupportedError outside 1 <= p <= 10.
std::vector<double> daubechies_filter(int p);

/// 0 for Haar, ceil(log2(2p)) otherwise.
int coarsest_scale(int p);

/// Full wavelet description. Haar gets q = 0; other orders use the numerical
/// estimate from `estimate_smoothness_q`.
WaveletSpec daubechies_wavelet(int p);

/// Same as `daubechies_wavelet` but with q supplied by the caller.
WaveletSpec daubechies_wavelet(int p, double q);

/// m0(w) = 2^{-1/2} sum_k h_k e^{-ikw}.
std::complex<double> lowpass_symbol(const WaveletSpec& spec, double w);
/// m1(w) = 2^{-1/2} sum_k g_k e^{-ikw}.
std::complex<double> highpass_symbol(const WaveletSpec& spec, double w);

/// Fourier transform of the scaling function, int phi(t) e^{-iwt} dt,
/// evaluated through the infinite product of `lowpass_symbol`.
std::complex<double> scaling_hat(const WaveletSpec& spec, double w);
/// Fourier transform of the mother wavelet.
std::complex<double> wavelet_hat(const WaveletSpec& spec, double w);

/// Parses "haar", "db1".."db10" or a bare order "2".
int parse_wavelet_order(const std::string& text);

}  // namespace wavecs
