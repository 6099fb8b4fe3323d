#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavecs/dwt.hpp"
#include "wavecs/wavelet.hpp"

namespace wavecs {

/// A piecewise-smooth function on [0,1] with known jump locations.
class PiecewiseFunction {
 public:
  using Evaluator = std::function<double(double)>;

  PiecewiseFunction(Evaluator evaluator, std::vector<double> breakpoints, double alpha,
                    double norm_estimate = 1.0, std::string label = "custom");

  [[nodiscard]] double operator()(double x) const { return evaluator_(x); }
  [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// Number of smooth pieces, i.e. jumps + 1.
  [[nodiscard]] std::size_t piece_count() const { return breakpoints_.size() + 1; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double norm_estimate() const { return norm_estimate_; }
  [[nodiscard]] const std::string& label() const { return label_; }

  /// Breakpoints of the 1-periodic extension inside [0,1): the interior jumps,
  /// plus 0 when f(0+) and f(1-) disagree.
  [[nodiscard]] std::vector<double> periodic_breakpoints(double tol = 1e-12) const;

 private:
  Evaluator evaluator_;
  std::vector<double> breakpoints_;
  double alpha_;
  double norm_estimate_;
  std::string label_;
};

/// Wavelet coefficients of f up to scale J (length 2^J) computed on an
/// oversampled grid of oversample * 2^J points to avoid the wavelet crime.
CoefficientVector function_to_coefficients(const PiecewiseFunction& f, const WaveletSpec& spec,
                                           int J, int oversample = 16);

/// f_K(x) = sum_{i=1}^K (-1)^{i mod 5} x^{i mod 3} sign(x - 1.3^{i-9}).
/// With `override_breakpoints` the i-th jump sits at override[i-1] instead.
PiecewiseFunction make_fk(int K, const std::optional<std::vector<double>>& override_breakpoints = std::nullopt);

}  // namespace wavecs
