#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace wavecs {

/// Sparsity in levels: level k spans coordinates [M_{k-1}, M_k) (M_0 = 0) and
/// may hold up to s_k nonzeros.
struct LevelSparsity {
  std::vector<long> level_ends;
  std::vector<long> s_local;

  [[nodiscard]] int levels() const { return static_cast<int>(level_ends.size()); }
  [[nodiscard]] long level_begin(int k) const { return k == 1 ? 0 : level_ends[static_cast<std::size_t>(k - 2)]; }
  [[nodiscard]] long total() const;
  void validate() const;
};

/// Weighted l1 distance to the (s,M)-sparse set: per level keep the s_k
/// entries with largest w_i |x_i| (ties keep the smaller index) and sum
/// w_i |x_i| over the rest.
double sigma_sM_weighted(const Eigen::VectorXcd& x, const LevelSparsity& plan, const Eigen::VectorXd& w);
double sigma_sM_weighted(const Eigen::VectorXd& x, const LevelSparsity& plan, const Eigen::VectorXd& w);

struct RipReport {
  std::vector<long> order;  // {s} or s_1..s_r
  double constant = 0.0;
  long supports_checked = 0;
};

/// max over |S| = s of ||A_S* A_S - I||. At most 16 columns, s <= 4.
RipReport rip_constant_bruteforce(const Eigen::MatrixXcd& A, int s);

/// Smallest delta with (1-delta)||Gx||^2 <= ||Ax||^2 <= (1+delta)||Gx||^2 over
/// all (s,M)-sparse x. At most 16 columns and 10^6 supports.
RipReport gripl_constant_bruteforce(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& G, const LevelSparsity& plan);

/// Fraction of `trials` runs whose error is below `threshold`. Trial t gets
/// seed mix_seed({master_seed, t}).
double success_rate(const std::function<double(std::uint64_t)>& trial_error, int trials, double threshold,
                    std::uint64_t master_seed);

}  // namespace wavecs
