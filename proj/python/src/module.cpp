#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wavecs/diagnostics.hpp"
#include "wavecs/dwt.hpp"
#include "wavecs/errors.hpp"
#include "wavecs/gramian.hpp"
#include "wavecs/operators.hpp"
#include "wavecs/pipelines.hpp"
#include "wavecs/recipes.hpp"
#include "wavecs/sampling.hpp"
#include "wavecs/solvers.hpp"
#include "wavecs/sweep.hpp"

namespace py = pybind11;
using namespace wavecs;

namespace {

WaveletSpec spec_of(const std::string& wavelet) { return daubechies_wavelet(parse_wavelet_order(wavelet)); }

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["status"] = to_string(r.status);
  d["iterations"] = r.iterations;
  d["residual"] = r.primal_residual;
  d["objective"] = r.objective;
  return d;
}

template <class Scalar>
py::tuple solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, std::optional<Eigen::VectorXd> w,
                std::optional<double> lam, const SolveOptions& opts) {
  const auto op = MeasurementOperator<Scalar>::from_matrix(A);
  const Eigen::VectorXd weights = w ? *w : Eigen::VectorXd::Ones(A.cols());
  SolveResult<Scalar> r;
  {
    py::gil_scoped_release release;
    r = lam ? weighted_sqrt_lasso(op, y, weights, *lam, opts) : weighted_basis_pursuit(op, y, weights, opts);
  }
  return py::make_tuple(r.x, report_dict(r.report));
}

SolveOptions options(int max_iters, double bp_tol, double opt_tol) {
  SolveOptions o;
  o.max_iters = max_iters;
  o.bp_tol = bp_tol;
  o.opt_tol = opt_tol;
  return o;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compressed-sensing wavelet approximation core";

  // translators run newest first, so bases are registered before subclasses
  auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto& precondition = py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", precondition.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", precondition.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", precondition.ptr());
  py::register_exception<CapError>(m, "CapError", precondition.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  m.def("daubechies_filter", &daubechies_filter, py::arg("p"));
  m.def("coarsest_scale", &coarsest_scale, py::arg("p"));

  m.def(
      "dwt",
      [](const std::vector<double>& x, const std::string& wavelet) {
        return periodized_dwt(x, spec_of(wavelet)).values;
      },
      py::arg("x"), py::arg("wavelet") = "haar", "Periodized DWT in canonical ordering.");
  m.def(
      "idwt",
      [](const std::vector<double>& d, const std::string& wavelet) {
        const WaveletSpec spec = spec_of(wavelet);
        CoefficientVector c;
        c.values = d;
        c.j0 = spec.j0;
        c.r = exact_log2(d.size()) - spec.j0;
        return periodized_idwt(c, spec);
      },
      py::arg("d"), py::arg("wavelet") = "haar");

  m.def(
      "fk",
      [](int K, const std::vector<double>& x) {
        const PiecewiseFunction f = make_fk(K);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
        return out;
      },
      py::arg("K"), py::arg("x"), "Evaluate the test function f_K.");
  m.def("fk_breakpoints", [](int K) { return make_fk(K).breakpoints(); }, py::arg("K"));
  m.def(
      "coefficients",
      [](int K, const std::string& wavelet, int J) {
        return function_to_coefficients(make_fk(K), spec_of(wavelet), J).values;
      },
      py::arg("K"), py::arg("wavelet"), py::arg("J"));

  m.def(
      "cross_gramian",
      [](const std::string& wavelet, long N, long M, int oversample) {
        return cross_gramian(spec_of(wavelet), N, M, oversample).entries;
      },
      py::arg("wavelet"), py::arg("N"), py::arg("M"), py::arg("oversample") = 16);
  m.def(
      "local_coherences",
      [](const std::string& wavelet, long N) {
        const CrossGramian U = cross_gramian(spec_of(wavelet), N, N);
        const int r = static_cast<int>(std::min(U.sampling_levels.size(), U.sparsity_levels.size()));
        Eigen::MatrixXd mu(r, r);
        for (int k = 1; k <= r; ++k) {
          for (int l = 1; l <= r; ++l) mu(k - 1, l - 1) = local_coherence(U, k, l);
        }
        return mu;
      },
      py::arg("wavelet"), py::arg("N"), "Matrix of mu(k, l), rows k = sampling level.");
  m.def(
      "balancing_constant",
      [](const std::string& wavelet, long N, long M) {
        return balancing_constant(cross_gramian(spec_of(wavelet), N, M), N, M);
      },
      py::arg("wavelet"), py::arg("N"), py::arg("M"));

  m.def(
      "recipe",
      [](const std::string& strategy, long m, const std::string& wavelet, double alpha, double delta,
         const std::string& mode, long dim) {
        const RecipeMode md = parse_recipe_mode(mode);
        const WaveletSpec spec = spec_of(wavelet);
        const long d = md == RecipeMode::Experiment ? dim : 0;
        if (strategy == "gauss") return key_values(describe(gauss_params(m, alpha, md, d, spec.p)));
        if (strategy == "optimal") return key_values(describe(optimal_params(m, alpha, md, d, spec.p)));
        if (strategy == "fourier") return key_values(describe(fourier_params(m, alpha, spec, delta, md, d)));
        throw PreconditionError("recipe: strategy must be gauss, optimal or fourier");
      },
      py::arg("strategy"), py::arg("m"), py::arg("wavelet") = "haar", py::arg("alpha") = 1.0,
      py::arg("delta") = 1e-5, py::arg("mode") = "experiment", py::arg("dim") = 4096,
      "Recipe parameters as a dict of strings.");
  m.def(
      "fourier_m_local",
      [](long m, const std::string& wavelet, const std::string& mode, long dim, double alpha, double delta) {
        const RecipeMode md = parse_recipe_mode(mode);
        return fourier_params(m, alpha, spec_of(wavelet), delta, md, md == RecipeMode::Experiment ? dim : 0).m_local;
      },
      py::arg("m"), py::arg("wavelet") = "haar", py::arg("mode") = "experiment", py::arg("dim") = 4096,
      py::arg("alpha") = 1.0, py::arg("delta") = 1e-5);
  m.def(
      "sampling_pattern",
      [](long m, const std::string& wavelet, long dim, std::uint64_t seed, bool dedup) {
        const FourierRecipe f = fourier_params(m, 1.0, spec_of(wavelet), 1e-5, RecipeMode::Experiment, dim);
        SamplingPattern p = draw_symmetric(f.scheme(), seed);
        if (dedup) p = deduplicate(p);
        return p.naturals;
      },
      py::arg("m"), py::arg("wavelet") = "haar", py::arg("dim") = 4096, py::arg("seed") = 1,
      py::arg("dedup") = false, "Natural Fourier indices of an experiment-mode pattern.");

  m.def(
      "basis_pursuit",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& y, std::optional<Eigen::VectorXd> w, int max_iters,
         double bp_tol, double opt_tol) { return solve<double>(A, y, w, std::nullopt, options(max_iters, bp_tol, opt_tol)); },
      py::arg("A"), py::arg("y"), py::arg("w") = py::none(), py::arg("max_iters") = 10000, py::arg("bp_tol") = 1e-6,
      py::arg("opt_tol") = 1e-6, "Weighted basis pursuit; returns (x, report).");
  m.def(
      "basis_pursuit",
      [](const Eigen::MatrixXcd& A, const Eigen::VectorXcd& y, std::optional<Eigen::VectorXd> w, int max_iters,
         double bp_tol, double opt_tol) {
        return solve<std::complex<double>>(A, y, w, std::nullopt, options(max_iters, bp_tol, opt_tol));
      },
      py::arg("A"), py::arg("y"), py::arg("w") = py::none(), py::arg("max_iters") = 10000, py::arg("bp_tol") = 1e-6,
      py::arg("opt_tol") = 1e-6);
  m.def(
      "sqrt_lasso",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lam, std::optional<Eigen::VectorXd> w,
         int max_iters, double opt_tol) { return solve<double>(A, y, w, lam, options(max_iters, 1e-6, opt_tol)); },
      py::arg("A"), py::arg("y"), py::arg("lam"), py::arg("w") = py::none(), py::arg("max_iters") = 10000,
      py::arg("opt_tol") = 1e-6, "Weighted square-root LASSO; returns (x, report).");
  m.def(
      "oracle_min_l1",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& y, std::optional<Eigen::VectorXd> w, int s_max) {
        const OracleResult r = oracle_min_l1(A, y, w ? *w : Eigen::VectorXd::Ones(A.cols()), s_max);
        return py::make_tuple(r.x, r.objective, to_string(r.status));
      },
      py::arg("A"), py::arg("y"), py::arg("w") = py::none(), py::arg("s_max") = 4);

  m.def(
      "rip_constant",
      [](const Eigen::MatrixXcd& A, int s) { return rip_constant_bruteforce(A, s).constant; }, py::arg("A"),
      py::arg("s"));
  m.def(
      "sigma_sM",
      [](const Eigen::VectorXd& x, const std::vector<long>& level_ends, const std::vector<long>& s_local,
         std::optional<Eigen::VectorXd> w) {
        return sigma_sM_weighted(x, LevelSparsity{level_ends, s_local}, w ? *w : Eigen::VectorXd::Ones(x.size()));
      },
      py::arg("x"), py::arg("level_ends"), py::arg("s_local"), py::arg("w") = py::none());

  m.def(
      "run",
      [](const std::string& method, long m, int K, const std::string& wavelet, long dim, std::uint64_t seed,
         const std::string& mode) {
        RunConfig cfg;
        cfg.dim = dim;
        cfg.mode = parse_recipe_mode(mode);
        RunResult r;
        {
          py::gil_scoped_release release;
          const ProblemContext ctx(make_fk(K), spec_of(wavelet), dim);
          r = run_method(ctx, parse_method(method), m, seed, cfg);
        }
        py::dict d;
        d["rel_error"] = r.rel_error;
        d["coefficients"] = r.coefficients;
        d["report"] = report_dict(r.report);
        d["runtime_ms"] = r.runtime_ms;
        d["recipe"] = key_values(r.recipe);
        return d;
      },
      py::arg("method"), py::arg("m"), py::arg("K") = 10, py::arg("wavelet") = "haar", py::arg("dim") = 4096,
      py::arg("seed") = 1, py::arg("mode") = "experiment", "One encode/decode run.");
  m.def(
      "sweep",
      [](const std::map<std::string, std::string>& config) {
        SweepConfig c;
        for (const auto& [k, v] : config) set_sweep_key(c, k, v);
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = run_sweep(c);
        }
        py::list rows;
        for (const auto& r : res.rows) {
          py::dict d;
          d["method"] = r.method;
          d["p"] = r.p;
          d["K"] = r.K;
          d["m"] = r.m;
          d["trial"] = r.trial;
          d["seed"] = r.seed;
          d["rel_l2_error"] = r.rel_l2_error;
          d["iterations"] = r.iterations;
          d["runtime_ms"] = r.runtime_ms;
          d["status"] = r.status;
          rows.append(d);
        }
        return py::make_tuple(rows, res.summary);
      },
      py::arg("config"), "Run a sweep from config keys (as in the key = value file); returns (rows, summary).");
  m.attr("CSV_HEADER") = kCsvHeader;
}
