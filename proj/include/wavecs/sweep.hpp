#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavecs/pipelines.hpp"

namespace wavecs {

struct SweepConfig {
  std::vector<Method> methods{Method::GaussBp, Method::OptimalBp, Method::FourierBp};
  int p = 1;
  int K = 10;
  std::optional<std::vector<double>> override_breakpoints;
  std::vector<long> m_grid{64, 128, 256, 512, 1024};
  double alpha = 1.0;
  double delta = 1e-5;
  RecipeMode mode = RecipeMode::Experiment;
  long dim = 4096;
  int trials = 10;
  std::uint64_t master_seed = 1;
  std::string output_path;
  std::string plot_path;
  int jobs = 1;
  SolveOptions solve;

  /// m_grid strictly increasing, every m <= dim, trials >= 1, jobs >= 1.
  void validate() const;
  [[nodiscard]] RunConfig run_config() const;
};

/// Reads `key = value` lines ('#' starts a comment) on top of `base`.
/// Keys: methods, wavelet, K, breakpoints, m_grid, alpha, delta, mode, dim,
/// trials, seed, output, plot, jobs, max_iters, bp_tol, opt_tol.
SweepConfig parse_sweep_config(std::istream& in, SweepConfig base = {});
SweepConfig load_sweep_config(const std::string& path, SweepConfig base = {});
/// Applies one key/value pair; throws PreconditionError on unknown keys.
void set_sweep_key(SweepConfig& config, const std::string& key, const std::string& value);

/// seed(trial, method, m) = mix_seed(master, method id, m, trial).
std::uint64_t trial_seed(std::uint64_t master_seed, Method method, long m, int trial);

struct ResultRow {
  std::string method;
  int p = 1;
  int K = 0;
  long m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double rel_l2_error = 0.0;  // NaN for failed runs
  int iterations = 0;
  double runtime_ms = 0.0;
  std::string status;
};

inline constexpr const char* kCsvHeader = "method,p,K,m,trial,seed,rel_l2_error,iterations,runtime_ms,status";

std::string format_row(const ResultRow& row);
ResultRow parse_row(const std::string& line);
/// Rows of a CSV stream; the header line is required.
std::vector<ResultRow> read_rows(std::istream& in);

struct SweepResult {
  std::vector<ResultRow> rows;  // canonical order: method, m, trial
  std::string summary;
};

/// Runs every (method, m, trial) with `jobs` worker threads. When `csv` is
/// given the header and rows are written to it in canonical order as they
/// complete. Failed runs are recorded with their status and a NaN error.
SweepResult run_sweep(const SweepConfig& config, std::ostream* csv = nullptr);

/// Median error per m over the rows of one method with finite errors.
std::map<long, double> median_errors(const std::vector<ResultRow>& rows, const std::string& method);
/// Least-squares slope of ln(median error) against ln(m) over m in [m_lo, m_hi];
/// needs at least three distinct m.
double fit_slope(const std::vector<ResultRow>& rows, const std::string& method, long m_lo, long m_hi);
/// Per-method medians, failure counts and slopes as text lines.
std::string summarize(const std::vector<ResultRow>& rows);

/// Log-log SVG of median error against m, one polyline per method.
std::string render_plot(const std::vector<ResultRow>& rows);
void emit_plot(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace wavecs
