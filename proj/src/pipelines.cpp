#include "wavecs/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "wavecs/errors.hpp"
#include "wavecs/operators.hpp"
#include "wavecs/sampling.hpp"

namespace wavecs {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void finish(RunResult& out, const ProblemContext& ctx, const RunConfig& cfg, Clock::time_point start) {
  out.rel_error = ctx.relative_error(out.coefficients);
  out.runtime_ms = elapsed_ms(start);
  if (cfg.strict && out.report.status != SolveStatus::Converged) {
    throw ConvergenceError(to_string(out.method) + ": decoder stopped with status " + to_string(out.report.status));
  }
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::GaussBp: return "gauss_bp";
    case Method::OptimalBp: return "optimal_bp";
    case Method::FourierBp: return "fourier_bp";
    case Method::FourierWbp: return "fourier_wbp";
    case Method::FourierWsrlasso: return "fourier_wsrlasso";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  for (Method m : all_methods()) {
    if (to_string(m) == text) return m;
  }
  throw PreconditionError("unknown method '" + text + "'");
}

int method_id(Method method) { return static_cast<int>(method) + 1; }

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::GaussBp, Method::OptimalBp, Method::FourierBp, Method::FourierWbp,
                                           Method::FourierWsrlasso};
  return methods;
}

namespace {

// ||f||^2 on [0,1] by Gauss-Legendre panels split at the breakpoints.
double squared_norm(const PiecewiseFunction& f) {
  const GaussLegendre& rule = gauss_legendre(32);
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), f.breakpoints().begin(), f.breakpoints().end());
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    for (int c = 0; c < 8; ++c) {
      const double a = edges[i] + (edges[i + 1] - edges[i]) * c / 8.0;
      const double b = edges[i] + (edges[i + 1] - edges[i]) * (c + 1) / 8.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double v = f(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[k]);
        acc += 0.5 * (b - a) * rule.weights[k] * v * v;
      }
    }
  }
  return acc;
}

}  // namespace

ProblemContext::ProblemContext(PiecewiseFunction f, WaveletSpec spec, long dim, int ref_extra, int oversample)
    : f_(std::move(f)), spec_(std::move(spec)), dim_(dim) {
  const int J = exact_log2(static_cast<std::size_t>(dim));
  if (J < spec_.j0 + 1) throw ShapeError("ProblemContext: dimension below 2^{j0+1}");
  if (ref_extra < 0) throw PreconditionError("ProblemContext: ref_extra must be >= 0");
  reference_ = function_to_coefficients(f_, spec_, J + ref_extra, oversample);
  const double captured =
      Eigen::Map<const Eigen::VectorXd>(reference_.values.data(), static_cast<long>(reference_.size())).squaredNorm();
  const double total = squared_norm(f_);
  if (total == 0.0) throw PreconditionError("ProblemContext: function has zero norm");
  tail_energy_ = std::max(0.0, total - captured);
  reference_norm_ = std::sqrt(std::max(total, captured));
}

Eigen::VectorXd ProblemContext::truncated(long n) const {
  if (n < 0 || n > static_cast<long>(reference_.size())) throw ShapeError("truncated: length beyond reference");
  return Eigen::Map<const Eigen::VectorXd>(reference_.values.data(), n);
}

const FourierSampleTable& ProblemContext::samples() const {
  std::call_once(samples_once_, [this] { samples_ = std::make_unique<FourierSampleTable>(f_, dim_); });
  return *samples_;
}

double ProblemContext::relative_error(const Eigen::VectorXcd& approx) const {
  const long n = approx.size();
  if (n > static_cast<long>(reference_.size())) throw ShapeError("relative_error: approximation longer than reference");
  const Eigen::Map<const Eigen::VectorXd> ref(reference_.values.data(), static_cast<long>(reference_.size()));
  const double head = (approx - ref.head(n).cast<std::complex<double>>()).squaredNorm();
  const double tail = ref.tail(ref.size() - n).squaredNorm();
  return std::sqrt(head + tail + tail_energy_) / reference_norm_;
}

double ProblemContext::relative_error(const Eigen::VectorXd& approx) const {
  return relative_error(Eigen::VectorXcd(approx.cast<std::complex<double>>()));
}

RunResult run_gauss(const ProblemContext& ctx, long m, std::uint64_t seed, const RunConfig& cfg) {
  const auto start = Clock::now();
  const GaussRecipe recipe = gauss_params(m, cfg.alpha, cfg.mode, ctx.dim(), ctx.spec().p);
  if (m > recipe.N) throw BudgetError("gauss: m exceeds N = " + std::to_string(recipe.N));
  RunResult out;
  out.method = Method::GaussBp;
  out.m = m;
  out.seed = seed;
  out.recipe = describe(recipe);
  const RealOperator A = gaussian_operator(m, recipe.N, seed);
  const Eigen::VectorXd y = A.apply(ctx.truncated(recipe.N));
  const auto sol = basis_pursuit(A, y, cfg.solve);
  out.coefficients = sol.x.cast<std::complex<double>>();
  out.report = sol.report;
  finish(out, ctx, cfg, start);
  return out;
}

RunResult run_optimal(const ProblemContext& ctx, long m, std::uint64_t seed, const RunConfig& cfg) {
  const auto start = Clock::now();
  const OptimalRecipe recipe = optimal_params(m, cfg.alpha, cfg.mode, ctx.dim(), ctx.spec().p);
  if (recipe.m1 + recipe.m2 != m) throw BudgetError("optimal: m1 + m2 != m");
  RunResult out;
  out.method = Method::OptimalBp;
  out.m = m;
  out.seed = seed;
  out.recipe = describe(recipe);
  const long fine = recipe.N2 - recipe.N1;
  const Eigen::VectorXd d = ctx.truncated(recipe.N2);
  const RealOperator A = gaussian_operator(recipe.m2, fine, seed);
  const Eigen::VectorXd y = A.apply(d.tail(fine));
  const auto sol = basis_pursuit(A, y, cfg.solve);
  Eigen::VectorXd x(recipe.N2);
  x.head(recipe.N1) = d.head(recipe.N1);
  x.tail(fine) = sol.x;
  out.coefficients = x.cast<std::complex<double>>();
  out.report = sol.report;
  finish(out, ctx, cfg, start);
  return out;
}

RunResult run_fourier(const ProblemContext& ctx, long m, Method decoder, std::uint64_t seed, const RunConfig& cfg) {
  if (decoder != Method::FourierBp && decoder != Method::FourierWbp && decoder != Method::FourierWsrlasso) {
    throw PreconditionError("run_fourier: decoder must be a fourier_* method");
  }
  const auto start = Clock::now();
  const FourierRecipe recipe = fourier_params(m, cfg.alpha, ctx.spec(), cfg.delta, cfg.mode, ctx.dim());
  if (cfg.mode == RecipeMode::Experiment && recipe.total_measurements() != m) {
    throw BudgetError("fourier: experiment budget not exhausted");
  }
  if (recipe.total_measurements() > m) throw BudgetError("fourier: local counts exceed m");
  RunResult out;
  out.method = decoder;
  out.m = m;
  out.seed = seed;
  out.recipe = describe(recipe);

  const LevelScheme scheme = recipe.scheme();
  SamplingPattern pattern =
      cfg.mode == RecipeMode::Experiment ? draw_symmetric(scheme, seed) : draw_multilevel(scheme, seed);
  if (cfg.dedup) pattern = deduplicate(pattern);
  const ComplexOperator A = fourier_operator(ctx.spec(), recipe.M, pattern);

  const FourierSampleTable& table = ctx.samples();
  const std::vector<double> D = scaling_weights(scheme, recipe.M);
  Eigen::VectorXcd y(static_cast<long>(pattern.size()));
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const long n = pattern.naturals[i];
    y(static_cast<long>(i)) = D[static_cast<std::size_t>(n - 1)] * table.at_natural(n);
  }

  SolveResult<std::complex<double>> sol;
  if (decoder == Method::FourierBp) {
    sol = basis_pursuit(A, y, cfg.solve);
  } else if (decoder == Method::FourierWbp) {
    sol = weighted_basis_pursuit(A, y, recipe.weights(), cfg.solve);
  } else {
    sol = weighted_sqrt_lasso(A, y, recipe.weights(), recipe.lambda, cfg.solve);
  }
  out.coefficients = std::move(sol.x);
  out.report = sol.report;
  finish(out, ctx, cfg, start);
  return out;
}

RunResult run_method(const ProblemContext& ctx, Method method, long m, std::uint64_t seed, const RunConfig& cfg) {
  switch (method) {
    case Method::GaussBp: return run_gauss(ctx, m, seed, cfg);
    case Method::OptimalBp: return run_optimal(ctx, m, seed, cfg);
    default: return run_fourier(ctx, m, method, seed, cfg);
  }
}

}  // namespace wavecs
