#include "wavecs/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavecs/errors.hpp"

namespace wavecs {

PiecewiseFunction::PiecewiseFunction(Evaluator evaluator, std::vector<double> breakpoints, double alpha,
                                     double norm_estimate, std::string label)
    : evaluator_(std::move(evaluator)),
      breakpoints_(std::move(breakpoints)),
      alpha_(alpha),
      norm_estimate_(norm_estimate),
      label_(std::move(label)) {
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > 0.0 && breakpoints_[i] < 1.0)) {
      throw PreconditionError("PiecewiseFunction: breakpoints must lie in (0,1)");
    }
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
      throw PreconditionError("PiecewiseFunction: breakpoints must be strictly increasing");
    }
  }
}

std::vector<double> PiecewiseFunction::periodic_breakpoints(double tol) const {
  std::vector<double> out;
  const double left = evaluator_(0.0);
  const double right = evaluator_(std::nextafter(1.0, 0.0));
  if (std::abs(left - right) > tol) out.push_back(0.0);
  out.insert(out.end(), breakpoints_.begin(), breakpoints_.end());
  return out;
}

CoefficientVector function_to_coefficients(const PiecewiseFunction& f, const WaveletSpec& spec, int J,
                                           int oversample) {
  if (oversample < 1 || (oversample & (oversample - 1)) != 0) {
    throw PreconditionError("function_to_coefficients: oversample must be a power of two");
  }
  if (J < spec.j0) throw ShapeError("function_to_coefficients: J below coarsest scale");
  const int extra = exact_log2(static_cast<std::size_t>(oversample));
  const std::size_t L = std::size_t{1} << (J + extra);
  const double inv_sqrt_l = 1.0 / std::sqrt(static_cast<double>(L));
  // Nodes sit at the centroid of each fine-scale scaling function; for Haar
  // this is the cell midpoint.
  const double centroid = spec.scaling_centroid();
  const auto& bps = f.breakpoints();

  std::vector<double> fine(L);
  for (std::size_t n = 0; n < L; ++n) {
    double x = (static_cast<double>(n) + centroid) / static_cast<double>(L);
    x -= std::floor(x);
    if (std::binary_search(bps.begin(), bps.end(), x)) x = std::nextafter(x, 2.0);
    fine[n] = f(x) * inv_sqrt_l;
  }
  std::vector<double> work(L);
  dwt_inplace(fine, work, spec);

  CoefficientVector out;
  out.values.assign(fine.begin(), fine.begin() + (std::ptrdiff_t{1} << J));
  out.j0 = spec.j0;
  out.r = J - spec.j0;
  return out;
}

PiecewiseFunction make_fk(int K, const std::optional<std::vector<double>>& override_breakpoints) {
  if (K < 1) throw PreconditionError("make_fk: K must be >= 1");
  std::vector<double> jumps(static_cast<std::size_t>(K));
  if (override_breakpoints) {
    if (override_breakpoints->size() != static_cast<std::size_t>(K)) {
      throw PreconditionError("make_fk: override needs exactly K breakpoints");
    }
    jumps = *override_breakpoints;
  } else {
    for (int i = 1; i <= K; ++i) jumps[static_cast<std::size_t>(i - 1)] = std::pow(1.3, i - 9);
  }

  std::vector<double> interior;
  for (double c : jumps) {
    if (c > 0.0 && c < 1.0) interior.push_back(c);
  }
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());

  auto eval = [jumps](double x) {
    double acc = 0.0;
    for (std::size_t idx = 0; idx < jumps.size(); ++idx) {
      const int i = static_cast<int>(idx) + 1;
      const double sign_term = (i % 5) % 2 == 0 ? 1.0 : -1.0;
      const int power = i % 3;
      const double mono = power == 0 ? 1.0 : (power == 1 ? x : x * x);
      // right-continuous sign
      const double s = x >= jumps[idx] ? 1.0 : -1.0;
      acc += sign_term * mono * s;
    }
    return acc;
  };

  double sup = 0.0;
  for (int n = 0; n <= 1000; ++n) sup = std::max(sup, std::abs(eval(n / 1000.0)));

  std::string label = "f" + std::to_string(K);
  if (override_breakpoints) label += "-override";
  return PiecewiseFunction(eval, std::move(interior), std::numeric_limits<double>::infinity(), sup, label);
}

}  // namespace wavecs
