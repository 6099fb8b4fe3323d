#include "wavecs/diagnostics.hpp"

#include <algorithm>
#include <numeric>

#include "wavecs/errors.hpp"
#include "wavecs/rng.hpp"

namespace wavecs {
namespace {

constexpr long kMaxColumns = 16;
constexpr long kMaxSupports = 1000000;

// Calls fn(subset) for each size-s subset of {begin..begin+n-1} in lexicographic order.
template <class Fn>
void for_each_subset(long begin, long n, long s, std::vector<long>& current, Fn&& fn) {
  std::vector<long> idx(static_cast<std::size_t>(s));
  std::iota(idx.begin(), idx.end(), 0L);
  const std::size_t base = current.size();
  while (true) {
    current.resize(base);
    for (long i : idx) current.push_back(begin + i);
    fn();
    long pos = s - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - s + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (long t = pos + 1; t < s; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
  current.resize(base);
}

double binomial(long n, long k) {
  double out = 1.0;
  for (long i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

Eigen::MatrixXcd columns(const Eigen::MatrixXcd& A, const std::vector<long>& S) {
  Eigen::MatrixXcd out(A.rows(), static_cast<long>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i) out.col(static_cast<long>(i)) = A.col(S[i]);
  return out;
}

double sigma_from_magnitudes(const Eigen::VectorXd& mag, const LevelSparsity& plan, const Eigen::VectorXd& w) {
  plan.validate();
  if (mag.size() != plan.total() || w.size() != mag.size()) {
    throw ShapeError("sigma_sM_weighted: vector length does not match the level structure");
  }
  if ((w.array() <= 0.0).any()) throw PreconditionError("sigma_sM_weighted: weights must be positive");
  double out = 0.0;
  for (int k = 1; k <= plan.levels(); ++k) {
    const long lo = plan.level_begin(k);
    const long hi = plan.level_ends[static_cast<std::size_t>(k - 1)];
    std::vector<long> order(static_cast<std::size_t>(hi - lo));
    std::iota(order.begin(), order.end(), lo);
    const auto keep = static_cast<std::ptrdiff_t>(plan.s_local[static_cast<std::size_t>(k - 1)]);
    std::stable_sort(order.begin(), order.end(),
                     [&](long a, long b) { return w(a) * mag(a) > w(b) * mag(b); });
    for (auto it = order.begin() + keep; it != order.end(); ++it) out += w(*it) * mag(*it);
  }
  return out;
}

}  // namespace

long LevelSparsity::total() const { return level_ends.empty() ? 0 : level_ends.back(); }

void LevelSparsity::validate() const {
  if (level_ends.empty() || level_ends.size() != s_local.size()) {
    throw ShapeError("LevelSparsity: need one sparsity per level");
  }
  for (int k = 1; k <= levels(); ++k) {
    const long size = level_ends[static_cast<std::size_t>(k - 1)] - level_begin(k);
    if (size < 1) throw ShapeError("LevelSparsity: level ends must be increasing");
    const long s = s_local[static_cast<std::size_t>(k - 1)];
    if (s < 0 || s > size) throw PreconditionError("LevelSparsity: need 0 <= s_k <= level size");
  }
}

double sigma_sM_weighted(const Eigen::VectorXcd& x, const LevelSparsity& plan, const Eigen::VectorXd& w) {
  return sigma_from_magnitudes(x.cwiseAbs(), plan, w);
}

double sigma_sM_weighted(const Eigen::VectorXd& x, const LevelSparsity& plan, const Eigen::VectorXd& w) {
  return sigma_from_magnitudes(x.cwiseAbs(), plan, w);
}

RipReport rip_constant_bruteforce(const Eigen::MatrixXcd& A, int s) {
  if (A.cols() > kMaxColumns) throw CapError("rip_constant_bruteforce: more than 16 columns");
  if (s < 1 || s > 4 || s > A.cols()) throw CapError("rip_constant_bruteforce: need 1 <= s <= min(4, columns)");
  RipReport report;
  report.order = {s};
  std::vector<long> S;
  for_each_subset(0, A.cols(), s, S, [&] {
    const Eigen::MatrixXcd AS = columns(A, S);
    const Eigen::MatrixXcd gram = AS.adjoint() * AS;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    report.constant = std::max({report.constant, std::abs(ev(0) - 1.0), std::abs(ev(ev.size() - 1) - 1.0)});
    ++report.supports_checked;
  });
  return report;
}

RipReport gripl_constant_bruteforce(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& G, const LevelSparsity& plan) {
  plan.validate();
  if (A.cols() > kMaxColumns) throw CapError("gripl_constant_bruteforce: more than 16 columns");
  if (A.cols() != plan.total() || G.rows() != G.cols() || G.cols() != A.cols()) {
    throw ShapeError("gripl_constant_bruteforce: A, G and the level structure disagree");
  }
  double count = 1.0;
  for (int k = 1; k <= plan.levels(); ++k) {
    const long size = plan.level_ends[static_cast<std::size_t>(k - 1)] - plan.level_begin(k);
    count *= binomial(size, plan.s_local[static_cast<std::size_t>(k - 1)]);
  }
  if (count > static_cast<double>(kMaxSupports)) throw CapError("gripl_constant_bruteforce: more than 10^6 supports");

  const Eigen::MatrixXcd AA = A.adjoint() * A;
  const Eigen::MatrixXcd GG = G.adjoint() * G;
  RipReport report;
  report.order = plan.s_local;
  std::vector<long> S;
  // Level-maximal supports suffice: the extreme generalized eigenvalues over a
  // support bound those over all of its subsets.
  std::function<void(int)> recurse = [&](int k) {
    if (k > plan.levels()) {
      if (S.empty()) return;
      const long n = static_cast<long>(S.size());
      Eigen::MatrixXcd a(n, n);
      Eigen::MatrixXcd g(n, n);
      for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
          a(i, j) = AA(S[static_cast<std::size_t>(i)], S[static_cast<std::size_t>(j)]);
          g(i, j) = GG(S[static_cast<std::size_t>(i)], S[static_cast<std::size_t>(j)]);
        }
      }
      const Eigen::LLT<Eigen::MatrixXcd> llt(g);
      if (llt.info() != Eigen::Success) throw PreconditionError("gripl_constant_bruteforce: G is singular on a support");
      Eigen::MatrixXcd tmp = llt.matrixL().solve(a);
      const Eigen::MatrixXcd red = llt.matrixL().solve(tmp.adjoint()).adjoint();
      const Eigen::MatrixXcd herm = 0.5 * (red + red.adjoint());
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues();
      report.constant = std::max({report.constant, std::abs(ev(0) - 1.0), std::abs(ev(n - 1) - 1.0)});
      ++report.supports_checked;
      return;
    }
    const long lo = plan.level_begin(k);
    const long size = plan.level_ends[static_cast<std::size_t>(k - 1)] - lo;
    const long s = plan.s_local[static_cast<std::size_t>(k - 1)];
    if (s == 0) {
      recurse(k + 1);
      return;
    }
    for_each_subset(lo, size, s, S, [&] { recurse(k + 1); });
  };
  recurse(1);
  return report;
}

double success_rate(const std::function<double(std::uint64_t)>& trial_error, int trials, double threshold,
                    std::uint64_t master_seed) {
  if (trials < 1) throw PreconditionError("success_rate: trials must be >= 1");
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const double err = trial_error(mix_seed({master_seed, static_cast<std::uint64_t>(t)}));
    if (err < threshold) ++hits;
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace wavecs
