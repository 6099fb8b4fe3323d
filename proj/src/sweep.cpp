#include "wavecs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "wavecs/errors.hpp"
#include "wavecs/rng.hpp"

namespace wavecs {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(value, &used));
    } else if constexpr (std::is_unsigned_v<T>) {
      out = static_cast<T>(std::stoull(value, &used));
    } else {
      out = static_cast<T>(std::stoll(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw PreconditionError("sweep config: bad value '" + value + "' for " + key);
  }
}

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const BudgetError*>(&e)) return "budget_error";
  if (dynamic_cast<const CapError*>(&e)) return "cap_error";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition_error";
  return "error";
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void SweepConfig::validate() const {
  if (methods.empty()) throw PreconditionError("sweep: no methods selected");
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] <= m_grid[i - 1]) throw PreconditionError("sweep: m_grid must be strictly increasing");
  }
  for (long m : m_grid) {
    if (m < 1 || m > dim) throw PreconditionError("sweep: every m must lie in [1, dim]");
  }
  if (trials < 1) throw PreconditionError("sweep: trials must be >= 1");
  if (jobs < 1) throw PreconditionError("sweep: jobs must be >= 1");
  if (K < 1) throw PreconditionError("sweep: K must be >= 1");
}

RunConfig SweepConfig::run_config() const {
  RunConfig cfg;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.mode = mode;
  cfg.dim = dim;
  cfg.solve = solve;
  cfg.strict = false;
  return cfg;
}

void set_sweep_key(SweepConfig& c, const std::string& key, const std::string& value) {
  if (key == "methods") {
    c.methods.clear();
    for (const auto& item : split(value, ',')) {
      if (!item.empty()) c.methods.push_back(parse_method(item));
    }
  } else if (key == "wavelet") {
    c.p = parse_wavelet_order(value);
  } else if (key == "K") {
    c.K = parse_number<int>(key, value);
  } else if (key == "breakpoints") {
    std::vector<double> bps;
    for (const auto& item : split(value, ',')) {
      if (!item.empty()) bps.push_back(parse_number<double>(key, item));
    }
    c.override_breakpoints = bps;
  } else if (key == "m_grid") {
    c.m_grid.clear();
    for (const auto& item : split(value, ',')) {
      if (!item.empty()) c.m_grid.push_back(parse_number<long>(key, item));
    }
  } else if (key == "alpha") {
    c.alpha = parse_number<double>(key, value);
  } else if (key == "delta") {
    c.delta = parse_number<double>(key, value);
  } else if (key == "mode") {
    c.mode = parse_recipe_mode(value);
  } else if (key == "dim") {
    c.dim = parse_number<long>(key, value);
  } else if (key == "trials") {
    c.trials = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "output") {
    c.output_path = value;
  } else if (key == "plot") {
    c.plot_path = value;
  } else if (key == "jobs") {
    c.jobs = parse_number<int>(key, value);
  } else if (key == "max_iters") {
    c.solve.max_iters = parse_number<int>(key, value);
  } else if (key == "bp_tol") {
    c.solve.bp_tol = parse_number<double>(key, value);
  } else if (key == "opt_tol") {
    c.solve.opt_tol = parse_number<double>(key, value);
  } else {
    throw PreconditionError("sweep config: unknown key '" + key + "'");
  }
}

SweepConfig parse_sweep_config(std::istream& in, SweepConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("sweep config line " + std::to_string(lineno) + ": expected key = value");
    }
    set_sweep_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

SweepConfig load_sweep_config(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file " + path);
  return parse_sweep_config(in, std::move(base));
}

std::uint64_t trial_seed(std::uint64_t master_seed, Method method, long m, int trial) {
  return mix_seed({master_seed, static_cast<std::uint64_t>(method_id(method)), static_cast<std::uint64_t>(m),
                   static_cast<std::uint64_t>(trial)});
}

std::string format_row(const ResultRow& r) {
  std::ostringstream s;
  s << r.method << ',' << r.p << ',' << r.K << ',' << r.m << ',' << r.trial << ',' << r.seed << ','
    << (std::isfinite(r.rel_l2_error) ? fmt("%.17g", r.rel_l2_error) : "nan") << ',' << r.iterations << ','
    << fmt("%.3f", r.runtime_ms) << ',' << r.status;
  return s.str();
}

ResultRow parse_row(const std::string& line) {
  const auto f = split(trim(line), ',');
  if (f.size() != 10) throw PreconditionError("csv row: expected 10 fields in '" + line + "'");
  ResultRow r;
  r.method = f[0];
  r.p = parse_number<int>("p", f[1]);
  r.K = parse_number<int>("K", f[2]);
  r.m = parse_number<long>("m", f[3]);
  r.trial = parse_number<int>("trial", f[4]);
  r.seed = parse_number<std::uint64_t>("seed", f[5]);
  r.rel_l2_error = f[6] == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_number<double>("rel_l2_error", f[6]);
  r.iterations = parse_number<int>("iterations", f[7]);
  r.runtime_ms = parse_number<double>("runtime_ms", f[8]);
  r.status = f[9];
  return r;
}

std::vector<ResultRow> read_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw PreconditionError("csv: missing or wrong header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

SweepResult run_sweep(const SweepConfig& config, std::ostream* csv) {
  config.validate();
  struct Task {
    Method method;
    long m;
    int trial;
  };
  std::vector<Task> tasks;
  for (Method method : config.methods) {
    for (long m : config.m_grid) {
      for (int t = 0; t < config.trials; ++t) tasks.push_back({method, m, t});
    }
  }
  if (csv) *csv << kCsvHeader << '\n' << std::flush;
  SweepResult result;
  result.rows.resize(tasks.size());
  if (tasks.empty()) {
    result.summary = summarize(result.rows);
    return result;
  }

  const ProblemContext ctx(make_fk(config.K, config.override_breakpoints), daubechies_wavelet(config.p), config.dim);
  const RunConfig run_cfg = config.run_config();

  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::vector<char> done(tasks.size(), 0);
  std::size_t written = 0;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      ResultRow row;
      row.method = to_string(task.method);
      row.p = config.p;
      row.K = config.K;
      row.m = task.m;
      row.trial = task.trial;
      row.seed = trial_seed(config.master_seed, task.method, task.m, task.trial);
      const auto start = std::chrono::steady_clock::now();
      try {
        const RunResult run = run_method(ctx, task.method, task.m, row.seed, run_cfg);
        row.rel_l2_error = run.rel_error;
        row.iterations = run.report.iterations;
        row.runtime_ms = run.runtime_ms;
        row.status = to_string(run.report.status);
      } catch (const std::exception& e) {
        row.rel_l2_error = std::numeric_limits<double>::quiet_NaN();
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.status = status_of(e);
      }
      std::lock_guard lock(mutex);
      result.rows[i] = std::move(row);
      done[i] = 1;
      while (written < tasks.size() && done[written]) {
        if (csv) *csv << format_row(result.rows[written]) << '\n' << std::flush;
        ++written;
      }
    }
  };

  const int n_threads = std::min<int>(config.jobs, static_cast<int>(tasks.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  result.summary = summarize(result.rows);
  if (!config.plot_path.empty()) emit_plot(result.rows, config.plot_path);
  return result;
}

std::map<long, double> median_errors(const std::vector<ResultRow>& rows, const std::string& method) {
  std::map<long, std::vector<double>> by_m;
  for (const auto& r : rows) {
    if (r.method == method && std::isfinite(r.rel_l2_error)) by_m[r.m].push_back(r.rel_l2_error);
  }
  std::map<long, double> out;
  for (auto& [m, errs] : by_m) out[m] = median(std::move(errs));
  return out;
}

double fit_slope(const std::vector<ResultRow>& rows, const std::string& method, long m_lo, long m_hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [m, e] : median_errors(rows, method)) {
    if (m < m_lo || m > m_hi || !(e > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(m)));
    ys.push_back(std::log(e));
  }
  if (xs.size() < 3) throw PreconditionError("fit_slope: need at least three distinct m values for " + method);
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::string summarize(const std::vector<ResultRow>& rows) {
  std::set<std::string> methods;
  for (const auto& r : rows) methods.insert(r.method);
  std::ostringstream s;
  for (const auto& method : methods) {
    std::map<long, std::pair<int, int>> counts;  // total, failed
    for (const auto& r : rows) {
      if (r.method != method) continue;
      ++counts[r.m].first;
      if (!std::isfinite(r.rel_l2_error)) ++counts[r.m].second;
    }
    const auto med = median_errors(rows, method);
    for (const auto& [m, c] : counts) {
      const auto it = med.find(m);
      s << "method=" << method << " m=" << m << " median="
        << (it == med.end() ? std::string("nan") : fmt("%.6g", it->second)) << " trials=" << c.first
        << " failed=" << c.second << '\n';
    }
    try {
      s << "method=" << method << " slope=" << fmt("%.4f", fit_slope(rows, method, 0, std::numeric_limits<long>::max()))
        << '\n';
    } catch (const PreconditionError&) {
      s << "method=" << method << " slope=nan\n";
    }
  }
  return s.str();
}

}  // namespace wavecs
