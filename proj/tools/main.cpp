#include <CLI11.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "wavecs/diagnostics.hpp"
#include "wavecs/errors.hpp"
#include "wavecs/gramian.hpp"
#include "wavecs/operators.hpp"
#include "wavecs/pipelines.hpp"
#include "wavecs/recipes.hpp"
#include "wavecs/rng.hpp"
#include "wavecs/sampling.hpp"
#include "wavecs/solvers.hpp"
#include "wavecs/sweep.hpp"

using namespace wavecs;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitNonConvergence = 3;

struct Globals {
  std::string wavelet = "haar";
  double alpha = 1.0;
  double delta = 1e-5;
  std::uint64_t seed = 1;
  int trials = 10;
  long m = 64;
  long dim = 4096;
  std::string mode = "experiment";
  std::string out;
  int jobs = 1;
  bool strict = false;
  int max_iters = 10000;
  double bp_tol = 1e-6;
  double opt_tol = 1e-6;

  [[nodiscard]] RecipeMode recipe_mode() const { return parse_recipe_mode(mode); }
  [[nodiscard]] WaveletSpec spec() const { return daubechies_wavelet(parse_wavelet_order(wavelet)); }
  [[nodiscard]] SolveOptions solve() const {
    SolveOptions o;
    o.max_iters = max_iters;
    o.bp_tol = bp_tol;
    o.opt_tol = opt_tol;
    return o;
  }
};

// Writes to --out when given, else to stdout.
class Output {
 public:
  explicit Output(const std::string& path, std::ios::openmode mode = std::ios::out) {
    if (!path.empty()) {
      file_.open(path, mode);
      if (!file_) throw PreconditionError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  [[nodiscard]] bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

std::vector<std::vector<double>> read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw PreconditionError("bad number '" + cell + "' in " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd read_csv_vector(const std::string& path) {
  std::vector<double> values;
  for (const auto& row : read_csv_matrix(path)) values.insert(values.end(), row.begin(), row.end());
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<long>(values.size()));
}

void print_fourier_extras(std::ostream& out, const FourierRecipe& f) {
  try {
    const SparsityPlan plan = sparsity_plan(f);
    out << "s_star=" << plan.s_star << "\ns_total=" << plan.s_total << "\ns_local=";
    for (std::size_t i = 0; i < plan.s_local.size(); ++i) out << (i ? "," : "") << plan.s_local[i];
    out << "\nweight_ratios=";
    for (std::size_t i = 0; i < plan.weight_ratios.size(); ++i) out << (i ? "," : "") << plan.weight_ratios[i];
    out << '\n';
  } catch (const BudgetError& e) {
    out << "sparsity_plan=unavailable (" << e.what() << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed-sensing wavelet approximation: encoders, decoders and experiments"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--wavelet", g.wavelet, "Wavelet: haar, db1..db10")->capture_default_str();
  app.add_option("--alpha", g.alpha, "Smoothness alpha of the target class")->capture_default_str();
  app.add_option("--delta", g.delta, "Recipe delta in (0,1)")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed (master seed for sweeps)")->capture_default_str();
  app.add_option("--trials", g.trials, "Trials per (method, m)")->capture_default_str();
  app.add_option("--m", g.m, "Measurement budget")->capture_default_str();
  app.add_option("--dim", g.dim, "Ambient dimension (power of two)")->capture_default_str();
  app.add_option("--mode", g.mode, "Recipe mode")->check(CLI::IsMember({"theory", "experiment"}))->capture_default_str();
  app.add_option("--out", g.out, "Output path (stdout when omitted)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--strict", g.strict, "Exit with code 3 when a solver does not converge");
  app.add_option("--max-iters", g.max_iters, "Solver iteration cap")->capture_default_str();
  app.add_option("--bp-tol", g.bp_tol, "Basis pursuit residual tolerance")->capture_default_str();
  app.add_option("--opt-tol", g.opt_tol, "Optimality tolerance")->capture_default_str();

  // recipe
  auto* recipe_cmd = app.add_subcommand("recipe", "Print derived recipe parameters as key=value lines");
  std::string strategy = "all";
  recipe_cmd->add_option("--strategy", strategy, "gauss|optimal|fourier|all")
      ->check(CLI::IsMember({"gauss", "optimal", "fourier", "all"}));

  // pattern
  auto* pattern_cmd = app.add_subcommand("pattern", "Draw a multilevel Fourier sampling pattern");
  bool dedup = false;
  pattern_cmd->add_flag("--dedup", dedup, "Drop repeated samples");

  // gramian
  auto* gramian_cmd = app.add_subcommand("gramian", "Write the Fourier-wavelet cross-Gramian (binary)");
  long gN = 0;
  long gM = 0;
  int oversample = 16;
  std::string coherence_path;
  gramian_cmd->add_option("--N", gN, "Rows (default --dim)");
  gramian_cmd->add_option("--M", gM, "Columns (default --dim)");
  gramian_cmd->add_option("--oversample", oversample, "Synthesis oversampling")->capture_default_str();
  gramian_cmd->add_option("--coherence", coherence_path, "Also write per-block coherences k,l,mu to this CSV");

  // coherence
  auto* coherence_cmd = app.add_subcommand("coherence", "Local coherences of the cross-Gramian as CSV k,l,mu");
  int levels = 7;
  coherence_cmd->add_option("--levels", levels, "Number of dyadic levels r")->capture_default_str();

  // balancing
  auto* balancing_cmd = app.add_subcommand("balancing", "Balancing constant of P_M U* P_N U P_M");
  long bN = 256;
  long bM = 256;
  balancing_cmd->add_option("--N", bN, "Rows")->capture_default_str();
  balancing_cmd->add_option("--M", bM, "Columns")->capture_default_str();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve an l1 problem given a dense matrix and data as CSV");
  std::string matrix_path;
  std::string y_path;
  std::string w_path;
  std::string decoder = "bp";
  double lambda = 0.0;
  solve_cmd->add_option("--matrix", matrix_path, "Dense matrix CSV, one row per line")->required();
  solve_cmd->add_option("--y", y_path, "Data vector CSV")->required();
  solve_cmd->add_option("--weights", w_path, "Weight vector CSV (default all ones)");
  solve_cmd->add_option("--decoder", decoder, "bp|wbp|wsrlasso")->check(CLI::IsMember({"bp", "wbp", "wsrlasso"}));
  solve_cmd->add_option("--lambda", lambda, "sqrt-LASSO parameter");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one encode/decode pipeline and print a CSV row");
  std::string method_name = "fourier_bp";
  int K = 10;
  run_cmd->add_option("--method", method_name, "gauss_bp|optimal_bp|fourier_bp|fourier_wbp|fourier_wsrlasso")
      ->capture_default_str();
  run_cmd->add_option("--K", K, "Test function f_K")->capture_default_str();
  run_cmd->add_flag("--dedup", dedup, "Drop repeated Fourier samples");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a (method, m, trial) grid and write CSV, summary and plot");
  std::string config_path;
  std::string methods_text;
  std::string m_grid_text;
  std::string breakpoints_text;
  std::string plot_path;
  int sweep_K = 10;
  sweep_cmd->add_option("--config", config_path, "key = value config file");
  sweep_cmd->add_option("--methods", methods_text, "Comma-separated methods");
  auto* m_grid_opt = sweep_cmd->add_option("--m-grid", m_grid_text, "Comma-separated budgets");
  auto* sweep_K_opt = sweep_cmd->add_option("--K", sweep_K, "Test function f_K");
  sweep_cmd->add_option("--override-breakpoints", breakpoints_text,
                        "Comma-separated jump locations replacing 1.3^(i-9) (non-standard variant)");
  sweep_cmd->add_option("--plot", plot_path, "SVG plot path");

  // diagnose
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Brute-force RIP / G-RIPL, coherence and balancing checks");
  std::string kind = "rip";
  long rows = 8;
  long cols = 16;
  int s = 2;
  std::string s_levels_text = "1,1,1";
  diagnose_cmd->add_option("--kind", kind, "rip|gripl|coherence|balancing")
      ->check(CLI::IsMember({"rip", "gripl", "coherence", "balancing"}))
      ->capture_default_str();
  diagnose_cmd->add_option("--rows", rows, "rip: Gaussian rows; gripl: Gramian rows")->capture_default_str();
  diagnose_cmd->add_option("--cols", cols, "rip: Gaussian columns (<= 16); gripl: wavelet columns")
      ->capture_default_str();
  diagnose_cmd->add_option("--s", s, "rip: sparsity")->capture_default_str();
  diagnose_cmd->add_option("--s-levels", s_levels_text, "gripl: comma-separated s_k over dyadic levels")
      ->capture_default_str();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Compare basis pursuit with the exhaustive l1 oracle");
  long o_rows = 6;
  long o_cols = 10;
  int o_sparsity = 2;
  bool weighted = false;
  oracle_cmd->add_option("--rows", o_rows, "Rows")->capture_default_str();
  oracle_cmd->add_option("--cols", o_cols, "Columns (<= 12)")->capture_default_str();
  oracle_cmd->add_option("--sparsity", o_sparsity, "Nonzeros of the planted solution (<= 4)")->capture_default_str();
  oracle_cmd->add_flag("--weighted", weighted, "Use random positive weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitPrecondition;
  }

  try {
    const RecipeMode mode = g.recipe_mode();
    if (*recipe_cmd) {
      Output out(g.out);
      const WaveletSpec spec = g.spec();
      const long dim = mode == RecipeMode::Experiment ? g.dim : 0;
      auto section = [&](auto&& fn) {
        try {
          out.stream() << fn();
        } catch (const BudgetError& e) {
          if (strategy != "all") throw;
          out.stream() << "error=" << e.what() << '\n';
        }
      };
      if (strategy == "gauss" || strategy == "all") {
        section([&] { return describe(gauss_params(g.m, g.alpha, mode, dim, spec.p)); });
      }
      if (strategy == "optimal" || strategy == "all") {
        section([&] { return describe(optimal_params(g.m, g.alpha, mode, dim, spec.p)); });
      }
      if (strategy == "fourier" || strategy == "all") {
        section([&] {
          const FourierRecipe f = fourier_params(g.m, g.alpha, spec, g.delta, mode, dim);
          std::ostringstream s;
          s << describe(f);
          print_fourier_extras(s, f);
          return s.str();
        });
      }
    } else if (*pattern_cmd) {
      const WaveletSpec spec = g.spec();
      const FourierRecipe f = fourier_params(g.m, g.alpha, spec, g.delta, mode, g.dim);
      SamplingPattern pat = mode == RecipeMode::Experiment ? draw_symmetric(f.scheme(), g.seed)
                                                           : draw_multilevel(f.scheme(), g.seed);
      if (dedup) pat = deduplicate(pat);
      Output out(g.out);
      write_pattern_csv(out.stream(), pat);
      (out.to_file() ? std::cout : std::cerr) << pattern_summary(pat) << '\n';
    } else if (*gramian_cmd) {
      if (g.out.empty()) throw PreconditionError("gramian: --out is required for the binary matrix");
      const WaveletSpec spec = g.spec();
      const long N = gN > 0 ? gN : g.dim;
      const long M = gM > 0 ? gM : g.dim;
      const CrossGramian U = cross_gramian(spec, N, M, oversample);
      Output out(g.out, std::ios::out | std::ios::binary);
      const std::uint64_t header[2] = {static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(M)};
      out.stream().write(reinterpret_cast<const char*>(header), sizeof header);
      std::vector<double> row(static_cast<std::size_t>(2 * M));
      for (long i = 0; i < N; ++i) {
        for (long j = 0; j < M; ++j) {
          row[static_cast<std::size_t>(2 * j)] = U.entries(i, j).real();
          row[static_cast<std::size_t>(2 * j + 1)] = U.entries(i, j).imag();
        }
        out.stream().write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
      }
      if (!coherence_path.empty()) {
        Output c(coherence_path);
        c.stream() << "k,l,mu\n" << std::setprecision(17);
        const int r = std::min(U.sampling_levels.size(), U.sparsity_levels.size());
        for (int k = 1; k <= r; ++k) {
          for (int l = 1; l <= r; ++l) c.stream() << k << ',' << l << ',' << local_coherence(U, k, l) << '\n';
        }
      }
      std::cout << "N=" << N << " M=" << M << " bytes=" << 16 + 16 * N * M << '\n';
    } else if (*coherence_cmd) {
      const WaveletSpec spec = g.spec();
      if (levels < 1 || spec.j0 + levels > 13) throw PreconditionError("coherence: need 1 <= levels and j0 + levels <= 13");
      const long N = 1L << (spec.j0 + levels);
      const CrossGramian U = cross_gramian(spec, N, N);
      Output out(g.out);
      out.stream() << "k,l,mu\n" << std::setprecision(17);
      for (int k = 1; k <= levels; ++k) {
        for (int l = 1; l <= levels; ++l) out.stream() << k << ',' << l << ',' << local_coherence(U, k, l) << '\n';
      }
    } else if (*balancing_cmd) {
      const CrossGramian U = cross_gramian(g.spec(), bN, bM);
      Output out(g.out);
      out.stream() << std::setprecision(17) << "N=" << bN << " M=" << bM << " theta=" << balancing_constant(U, bN, bM)
                   << '\n';
    } else if (*solve_cmd) {
      const auto rows_data = read_csv_matrix(matrix_path);
      if (rows_data.empty()) throw PreconditionError("solve: empty matrix");
      Eigen::MatrixXd A(static_cast<long>(rows_data.size()), static_cast<long>(rows_data[0].size()));
      for (std::size_t i = 0; i < rows_data.size(); ++i) {
        if (static_cast<long>(rows_data[i].size()) != A.cols()) throw ShapeError("solve: ragged matrix CSV");
        for (std::size_t j = 0; j < rows_data[i].size(); ++j) A(static_cast<long>(i), static_cast<long>(j)) = rows_data[i][j];
      }
      const Eigen::VectorXd y = read_csv_vector(y_path);
      if (y.size() != A.rows()) throw ShapeError("solve: y length does not match matrix rows");
      const Eigen::VectorXd w = w_path.empty() ? Eigen::VectorXd::Ones(A.cols()) : read_csv_vector(w_path);
      const RealOperator op = RealOperator::from_matrix(A);
      SolveResult<double> res;
      if (decoder == "bp") {
        res = basis_pursuit(op, y, g.solve());
      } else if (decoder == "wbp") {
        res = weighted_basis_pursuit(op, y, w, g.solve());
      } else {
        if (!(lambda > 0.0)) throw PreconditionError("solve: --lambda must be positive for wsrlasso");
        res = weighted_sqrt_lasso(op, y, w, lambda, g.solve());
      }
      Output out(g.out);
      out.stream() << std::setprecision(17);
      for (long i = 0; i < res.x.size(); ++i) out.stream() << res.x(i) << '\n';
      (out.to_file() ? std::cout : std::cerr) << res.report.to_json() << '\n';
      if (g.strict && res.report.status != SolveStatus::Converged) return kExitNonConvergence;
    } else if (*run_cmd) {
      RunConfig cfg;
      cfg.alpha = g.alpha;
      cfg.delta = g.delta;
      cfg.mode = mode;
      cfg.dim = g.dim;
      cfg.solve = g.solve();
      cfg.dedup = dedup;
      cfg.strict = g.strict;
      const Method method = parse_method(method_name);
      const WaveletSpec spec = g.spec();
      const ProblemContext ctx(make_fk(K), spec, g.dim);
      const RunResult res = run_method(ctx, method, g.m, g.seed, cfg);
      ResultRow row;
      row.method = to_string(method);
      row.p = spec.p;
      row.K = K;
      row.m = g.m;
      row.trial = 0;
      row.seed = g.seed;
      row.rel_l2_error = res.rel_error;
      row.iterations = res.report.iterations;
      row.runtime_ms = res.runtime_ms;
      row.status = to_string(res.report.status);
      Output out(g.out);
      out.stream() << kCsvHeader << '\n' << format_row(row) << '\n';
      std::cerr << res.recipe << "q=" << spec.q << '\n' << res.report.to_json() << '\n';
    } else if (*sweep_cmd) {
      SweepConfig cfg;
      cfg.p = g.spec().p;
      if (!config_path.empty()) cfg = load_sweep_config(config_path, cfg);
      auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
      if (given("--wavelet")) cfg.p = parse_wavelet_order(g.wavelet);
      if (given("--alpha")) cfg.alpha = g.alpha;
      if (given("--delta")) cfg.delta = g.delta;
      if (given("--seed")) cfg.master_seed = g.seed;
      if (given("--trials")) cfg.trials = g.trials;
      if (given("--dim")) cfg.dim = g.dim;
      if (given("--mode")) cfg.mode = mode;
      if (given("--out")) cfg.output_path = g.out;
      if (given("--jobs")) cfg.jobs = g.jobs;
      if (given("--max-iters")) cfg.solve.max_iters = g.max_iters;
      if (given("--bp-tol")) cfg.solve.bp_tol = g.bp_tol;
      if (given("--opt-tol")) cfg.solve.opt_tol = g.opt_tol;
      if (given("--m")) cfg.m_grid = {g.m};
      if (!methods_text.empty()) set_sweep_key(cfg, "methods", methods_text);
      if (m_grid_opt->count() > 0) set_sweep_key(cfg, "m_grid", m_grid_text);
      if (sweep_K_opt->count() > 0) cfg.K = sweep_K;
      if (!breakpoints_text.empty()) set_sweep_key(cfg, "breakpoints", breakpoints_text);
      if (!plot_path.empty()) cfg.plot_path = plot_path;
      Output out(cfg.output_path);
      const SweepResult res = run_sweep(cfg, &out.stream());
      (out.to_file() ? std::cout : std::cerr) << res.summary;
    } else if (*diagnose_cmd) {
      Output out(g.out);
      out.stream() << std::setprecision(17);
      if (kind == "rip") {
        const Eigen::MatrixXcd A = gaussian_matrix(rows, cols, g.seed).cast<std::complex<double>>();
        const RipReport rep = rip_constant_bruteforce(A, s);
        out.stream() << "kind,order,constant,supports_checked\nrip," << s << ',' << rep.constant << ','
                     << rep.supports_checked << '\n';
      } else if (kind == "gripl") {
        const WaveletSpec spec = g.spec();
        const CrossGramian U = cross_gramian(spec, rows, cols);
        LevelSparsity plan;
        for (long e = 1L << spec.j0; e < cols; e *= 2) plan.level_ends.push_back(e * 2);
        std::stringstream ss(s_levels_text);
        std::string item;
        while (std::getline(ss, item, ',')) plan.s_local.push_back(std::stol(item));
        const RipReport rep = gripl_constant_bruteforce(U.entries, gram_sqrt(U, rows, cols), plan);
        out.stream() << "kind,order,constant,supports_checked\ngripl,";
        for (std::size_t i = 0; i < rep.order.size(); ++i) out.stream() << (i ? ";" : "") << rep.order[i];
        out.stream() << ',' << rep.constant << ',' << rep.supports_checked << '\n';
      } else if (kind == "coherence") {
        const CrossGramian U = cross_gramian(g.spec(), rows, cols);
        out.stream() << "k,l,mu\n";
        const int r = std::min(U.sampling_levels.size(), U.sparsity_levels.size());
        for (int k = 1; k <= r; ++k) {
          for (int l = 1; l <= r; ++l) out.stream() << k << ',' << l << ',' << local_coherence(U, k, l) << '\n';
        }
      } else {
        const CrossGramian U = cross_gramian(g.spec(), rows, cols);
        out.stream() << "kind,N,M,theta\nbalancing," << rows << ',' << cols << ',' << balancing_constant(U, rows, cols)
                     << '\n';
      }
    } else if (*oracle_cmd) {
      CounterRng rng(g.seed, 0x6f7263);
      Eigen::MatrixXd A(o_rows, o_cols);
      for (long i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
      Eigen::VectorXd x = Eigen::VectorXd::Zero(o_cols);
      for (int t = 0; t < o_sparsity && t < o_cols; ++t) {
        long idx;
        do {
          idx = static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(o_cols)));
        } while (x(idx) != 0.0);
        x(idx) = rng.normal();
      }
      Eigen::VectorXd w = Eigen::VectorXd::Ones(o_cols);
      if (weighted) {
        for (long i = 0; i < o_cols; ++i) w(i) = 0.5 + rng.uniform();
      }
      const Eigen::VectorXd y = A * x;
      const OracleResult orc = oracle_min_l1(A, y, w, std::min<int>(4, static_cast<int>(o_rows)));
      SolveOptions opts = g.solve();
      opts.bp_tol = 1e-10;
      const auto bp = weighted_basis_pursuit(RealOperator::from_matrix(A), y, w, opts);
      const double obj = weighted_l1(bp.x, w);
      Output out(g.out);
      out.stream() << std::setprecision(12) << "{\"oracle_objective\":" << orc.objective
                   << ",\"bp_objective\":" << obj << ",\"gap\":" << std::abs(obj - orc.objective)
                   << ",\"supports_checked\":" << orc.supports_checked << ",\"oracle_status\":\""
                   << to_string(orc.status) << "\",\"bp_status\":\"" << to_string(bp.report.status) << "\"}\n";
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
