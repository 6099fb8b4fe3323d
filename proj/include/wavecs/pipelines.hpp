#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "wavecs/dwt.hpp"
#include "wavecs/fourier.hpp"
#include "wavecs/function.hpp"
#include "wavecs/recipes.hpp"
#include "wavecs/solvers.hpp"
#include "wavecs/wavelet.hpp"

namespace wavecs {

enum class Method { GaussBp, OptimalBp, FourierBp, FourierWbp, FourierWsrlasso };

std::string to_string(Method method);
Method parse_method(const std::string& text);
/// Stable numeric id used in seed derivation.
int method_id(Method method);
const std::vector<Method>& all_methods();

struct RunConfig {
  double alpha = 1.0;
  double delta = 1e-5;
  RecipeMode mode = RecipeMode::Experiment;
  long dim = 4096;
  SolveOptions solve;
  int oversample = 16;
  /// Reference coefficients are computed at scale log2(dim) + ref_extra.
  int ref_extra = 2;
  /// Drop repeated Fourier samples.
  bool dedup = false;
  /// Throw ConvergenceError when the decoder does not converge.
  bool strict = false;
};

/// Function, wavelet and the quantities shared by every run on them: the
/// reference coefficients and a table of Fourier samples up to `dim`.
class ProblemContext {
 public:
  ProblemContext(PiecewiseFunction f, WaveletSpec spec, long dim, int ref_extra = 2, int oversample = 16);

  [[nodiscard]] const PiecewiseFunction& function() const { return f_; }
  [[nodiscard]] const WaveletSpec& spec() const { return spec_; }
  [[nodiscard]] long dim() const { return dim_; }
  [[nodiscard]] const CoefficientVector& reference() const { return reference_; }
  /// First n reference coefficients.
  [[nodiscard]] Eigen::VectorXd truncated(long n) const;
  /// Fourier samples at natural indices 1..dim, computed on first use.
  [[nodiscard]] const FourierSampleTable& samples() const;
  /// L2 error of the expansion with coefficients `approx` relative to ||f||:
  /// coefficient error against the reference (approx zero-padded), plus the
  /// energy of f beyond the reference scale, ||f||^2 - ||d_ref||^2.
  [[nodiscard]] double relative_error(const Eigen::VectorXcd& approx) const;
  [[nodiscard]] double relative_error(const Eigen::VectorXd& approx) const;

 private:
  PiecewiseFunction f_;
  WaveletSpec spec_;
  long dim_;
  CoefficientVector reference_;
  double reference_norm_ = 0.0;
  double tail_energy_ = 0.0;
  mutable std::once_flag samples_once_;
  mutable std::unique_ptr<FourierSampleTable> samples_;
};

struct RunResult {
  Method method = Method::GaussBp;
  long m = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXcd coefficients;
  double rel_error = 0.0;
  SolveReport report;
  double runtime_ms = 0.0;
  /// Recipe parameters as key=value lines.
  std::string recipe;
};

RunResult run_gauss(const ProblemContext& ctx, long m, std::uint64_t seed, const RunConfig& cfg);
/// Coarse coefficients copied from the encoding; fine part decoded by basis pursuit.
RunResult run_optimal(const ProblemContext& ctx, long m, std::uint64_t seed, const RunConfig& cfg);
/// decoder is one of FourierBp, FourierWbp, FourierWsrlasso.
RunResult run_fourier(const ProblemContext& ctx, long m, Method decoder, std::uint64_t seed, const RunConfig& cfg);
RunResult run_method(const ProblemContext& ctx, Method method, long m, std::uint64_t seed, const RunConfig& cfg);

}  // namespace wavecs
