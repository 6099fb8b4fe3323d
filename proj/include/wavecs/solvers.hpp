#pragma once

#include <Eigen/Dense>
#include <string>

#include "wavecs/operators.hpp"

namespace wavecs {

enum class SolveStatus { Converged, MaxIters, Infeasible };

/// Basis pursuit engine. Auto picks Homotopy for operators with real
/// entries and DouglasRachford otherwise.
enum class BpMethod { Auto, DouglasRachford, Homotopy };

std::string to_string(SolveStatus status);

struct SolveOptions {
  int max_iters = 10000;
  double bp_tol = 1e-6;
  double opt_tol = 1e-6;
  /// Multiplier on the step balance of the iterations: sigma / tau for
  /// square-root LASSO (relative to (lambda * mean w)^2), the threshold scale
  /// for Douglas-Rachford.
  double step_ratio = 1.0;
  BpMethod bp_method = BpMethod::Auto;
  int verbosity = 0;
};

struct SolveReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIters;

  /// {"status":..., "iterations":..., "residual":..., "objective":...}
  [[nodiscard]] std::string to_json() const;
};

template <class Scalar>
struct SolveResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  SolveReport report;
  /// A subgradient of the weighted l1 norm at x lying in the range of A*
  /// (basis pursuit only); a KKT certificate for the returned point.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dual_image;
};

/// min ||z||_{1,w} s.t. ||Az - y|| <= bp_tol * max(1, ||y||).
///
/// DouglasRachford: splitting with exact projection onto {Az = y}; stops once
/// the relative duality gap drops below opt_tol.
/// Homotopy (real operators): follows the weighted LASSO path from the
/// largest breakpoint down to the point where the residual reaches the
/// tolerance; each step costs one product with A*.
template <class Scalar>
SolveResult<Scalar> weighted_basis_pursuit(const MeasurementOperator<Scalar>& A,
                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
                                           const Eigen::VectorXd& w, const SolveOptions& opts = {});

template <class Scalar>
SolveResult<Scalar> basis_pursuit(const MeasurementOperator<Scalar>& A,
                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, const SolveOptions& opts = {});

/// min lambda ||z||_{1,w} + ||Az - y||_2 by Chambolle-Pock; returns the best
/// iterate and stops once its gap to the best dual bound is below opt_tol.
template <class Scalar>
SolveResult<Scalar> weighted_sqrt_lasso(const MeasurementOperator<Scalar>& A,
                                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
                                        const Eigen::VectorXd& w, double lambda, const SolveOptions& opts = {});

struct OracleResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  long supports_checked = 0;
};

/// Exhaustive weighted-l1 minimum over vertices of {Az = y} with at most
/// s_max nonzeros. A has at most 12 columns, s_max <= 4.
OracleResult oracle_min_l1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w, int s_max);

/// sum_i w_i |z_i|
template <class Derived>
double weighted_l1(const Eigen::MatrixBase<Derived>& z, const Eigen::VectorXd& w) {
  return (z.cwiseAbs().array() * w.array()).sum();
}

}  // namespace wavecs
