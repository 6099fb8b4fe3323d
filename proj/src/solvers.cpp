#include "wavecs/solvers.hpp"

#include "json.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "wavecs/errors.hpp"

namespace wavecs {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["status"] = to_string(status);
  j["iterations"] = iterations;
  j["residual"] = primal_residual;
  j["objective"] = objective;
  return j.dump();
}

namespace {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// prox of t * sum_i w_i |z_i|
template <class Scalar>
Vec<Scalar> soft_threshold(const Vec<Scalar>& u, const Eigen::VectorXd& thresholds) {
  Vec<Scalar> out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i));
    out(i) = mag > thresholds(i) ? u(i) * ((mag - thresholds(i)) / mag) : Scalar(0);
  }
  return out;
}

void check_weights(const Eigen::VectorXd& w, long cols) {
  if (w.size() != cols) throw ShapeError("solver: weight length does not match operator columns");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w(i) > 0.0) || !std::isfinite(w(i))) throw PreconditionError("solver: weights must be positive and finite");
  }
}

void check_options(const SolveOptions& opts) {
  if (opts.max_iters < 1) throw PreconditionError("solver: max_iters must be >= 1");
  if (!(opts.bp_tol > 0.0) || !(opts.opt_tol > 0.0)) throw PreconditionError("solver: tolerances must be positive");
  if (!(opts.step_ratio > 0.0)) throw PreconditionError("solver: step_ratio must be positive");
}

template <class Scalar>
SolveResult<Scalar> douglas_rachford_bp(const MeasurementOperator<Scalar>& A, const Vec<Scalar>& y,
                                        const Eigen::VectorXd& w, const SolveOptions& opts) {
  auto project = [&](const Vec<Scalar>& z) -> Vec<Scalar> { return z - A.adjoint(A.row_gram_solve(A.apply(z) - y)); };

  SolveResult<Scalar> result;
  const double ynorm = y.norm();
  const double feasible_tol = opts.bp_tol * std::max(1.0, ynorm);
  Vec<Scalar> x = project(Vec<Scalar>::Zero(A.cols()));
  if (x.template lpNorm<Eigen::Infinity>() == 0.0) {
    result.x = x;
    result.dual_image = Vec<Scalar>::Zero(A.cols());
    result.report.iterations = 0;
    result.report.primal_residual = (A.apply(x) - y).norm();
    result.report.objective = 0.0;
    result.report.status = result.report.primal_residual <= feasible_tol ? SolveStatus::Converged : SolveStatus::Infeasible;
    return result;
  }

  // Threshold scale tied to the minimum-norm solution keeps the iteration
  // invariant under rescaling of y and w.
  const double gamma = opts.step_ratio * 0.03 / std::sqrt(static_cast<double>(A.cols())) *
                       x.cwiseAbs().maxCoeff() / w.maxCoeff();
  const Eigen::VectorXd thresholds = gamma * w;
  Vec<Scalar> z = x;
  Vec<Scalar> v;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= opts.max_iters; ++it) {
    x = project(z);
    // x - z lies in range(A*); scaled to dual feasibility it bounds the
    // optimum from below.
    const Vec<Scalar> u = x - z;
    v = soft_threshold<Scalar>(2.0 * x - z, thresholds);
    z += v - x;
    const double objective = weighted_l1(x, w);
    const double split = (x - v).norm();
    const double dual_scale = (u.cwiseAbs().array() / w.array()).maxCoeff();
    const double dual = dual_scale > 0.0 ? std::real(u.dot(x)) / dual_scale : 0.0;
    const double rel_gap = (objective - dual) / std::max(1.0, objective);
    if (opts.verbosity > 1 && it % 100 == 0) {
      std::cerr << "bp it=" << it << " obj=" << objective << " gap=" << rel_gap << " split=" << split << '\n';
    }
    if (rel_gap <= opts.opt_tol) {
      converged = true;
      break;
    }
  }
  x = project(z);
  result.x = x;
  result.dual_image = (x - z) / gamma;
  result.report.iterations = std::min(it, opts.max_iters);
  result.report.primal_residual = (A.apply(x) - y).norm();
  result.report.objective = weighted_l1(x, w);
  if (result.report.primal_residual > feasible_tol) {
    result.report.status = SolveStatus::Infeasible;
  } else {
    result.report.status = converged ? SolveStatus::Converged : SolveStatus::MaxIters;
  }
  return result;
}

// Weighted LASSO homotopy in the variable u = w .* x, i.e. on the columns
// A_j / w_j. R holds the Cholesky factor of the active Gram matrix.
SolveResult<double> homotopy_bp(const RealOperator& op, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                const SolveOptions& opts) {
  Eigen::MatrixXd materialized;
  const Eigen::MatrixXd* stored = op.stored_matrix();
  if (stored == nullptr) {
    materialized = op.dense();
    stored = &materialized;
  }
  const Eigen::MatrixXd& A = *stored;
  const long m = A.rows();
  const long n = A.cols();
  const double sigma = opts.bp_tol * std::max(1.0, y.norm());

  SolveResult<double> result;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = y;
  Eigen::MatrixXd rhs(m, 2);
  Eigen::MatrixXd prod(n, 2);
  rhs.col(0) = r;
  rhs.col(1).setZero();
  Eigen::VectorXd c = (A.transpose() * r).cwiseQuotient(w);
  double lambda = c.cwiseAbs().maxCoeff();
  if (r.norm() <= sigma || lambda == 0.0) {
    result.x = Eigen::VectorXd::Zero(n);
    result.dual_image = Eigen::VectorXd::Zero(n);
    result.report.primal_residual = r.norm();
    result.report.status = r.norm() <= sigma ? SolveStatus::Converged : SolveStatus::Infeasible;
    return result;
  }

  std::vector<long> active;
  std::vector<char> state(static_cast<std::size_t>(n), 0);  // 1 active, 2 dependent
  Eigen::VectorXd signs(m);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);

  auto column = [&](long j) { return A.col(j) / w(j); };
  auto try_add = [&](long j) {
    const long k = static_cast<long>(active.size());
    const Eigen::VectorXd b = column(j);
    Eigen::VectorXd kv(k);
    for (long t = 0; t < k; ++t) kv(t) = A.col(active[static_cast<std::size_t>(t)]).dot(b) / w(active[static_cast<std::size_t>(t)]);
    if (k > 0) R.topLeftCorner(k, k).triangularView<Eigen::Upper>().transpose().solveInPlace(kv);
    const double bb = b.squaredNorm();
    const double rho2 = bb - kv.squaredNorm();
    if (k >= m || rho2 <= 1e-11 * bb) {
      state[static_cast<std::size_t>(j)] = 2;
      return false;
    }
    R.block(0, k, k, 1) = kv;
    R(k, k) = std::sqrt(rho2);
    active.push_back(j);
    signs(k) = c(j) >= 0.0 ? 1.0 : -1.0;
    state[static_cast<std::size_t>(j)] = 1;
    return true;
  };
  auto drop = [&](long t) {
    const long k = static_cast<long>(active.size());
    for (long col = t; col + 1 < k; ++col) {
      R.block(0, col, k, 1) = R.block(0, col + 1, k, 1);
      signs(col) = signs(col + 1);
    }
    R.block(0, k - 1, k, 1).setZero();
    for (long i = t; i + 1 < k; ++i) {
      const double a = R(i, i);
      const double b = R(i + 1, i);
      const double h = std::hypot(a, b);
      if (h == 0.0) continue;
      const double cs = a / h;
      const double sn = b / h;
      for (long col = i; col + 1 < k; ++col) {
        const double t1 = R(i, col);
        const double t2 = R(i + 1, col);
        R(i, col) = cs * t1 + sn * t2;
        R(i + 1, col) = -sn * t1 + cs * t2;
      }
    }
    R.row(k - 1).setZero();
    const long j = active[static_cast<std::size_t>(t)];
    u(j) = 0.0;
    state[static_cast<std::size_t>(j)] = 0;
    active.erase(active.begin() + t);
  };

  {
    Eigen::Index first = 0;
    c.cwiseAbs().maxCoeff(&first);
    try_add(first);
  }
  bool converged = false;
  int step = 0;
  long last_added = -1;
  long last_dropped = -1;
  double dropped_sign = 0.0;
  for (step = 1; step <= opts.max_iters; ++step) {
    const long k = static_cast<long>(active.size());
    Eigen::VectorXd d = signs.head(k);
    const auto Rk = R.topLeftCorner(k, k).triangularView<Eigen::Upper>();
    Rk.transpose().solveInPlace(d);
    Rk.solveInPlace(d);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for (long t = 0; t < k; ++t) v += (d(t) / w(active[static_cast<std::size_t>(t)])) * A.col(active[static_cast<std::size_t>(t)]);
    rhs.col(0) = v;
    rhs.col(1) = r;
    prod.noalias() = A.transpose() * rhs;
    const Eigen::VectorXd a = prod.col(0).cwiseQuotient(w);
    c = prod.col(1).cwiseQuotient(w);

    double gamma = lambda;
    int event = 0;  // 0 path end, 1 add, 2 drop, 3 residual
    long which = -1;
    const double tiny = 1e-14 * std::max(1.0, lambda);
    for (long j = 0; j < n; ++j) {
      if (state[static_cast<std::size_t>(j)] != 0) continue;
      const double lo = 1.0 - a(j);
      const double hi = 1.0 + a(j);
      // a column just dropped at +-lambda may only re-enter through the other bound
      if (lo > 1e-14 && !(j == last_dropped && dropped_sign > 0.0)) {
        const double g = (lambda - c(j)) / lo;
        if (g > tiny && g < gamma) { gamma = g; event = 1; which = j; }
      }
      if (hi > 1e-14 && !(j == last_dropped && dropped_sign < 0.0)) {
        const double g = (lambda + c(j)) / hi;
        if (g > tiny && g < gamma) { gamma = g; event = 1; which = j; }
      }
    }
    for (long t = 0; t < k; ++t) {
      const long j = active[static_cast<std::size_t>(t)];
      if (d(t) == 0.0 || j == last_added) continue;
      const double g = -u(j) / d(t);
      if (g > tiny && g < gamma) { gamma = g; event = 2; which = t; }
    }
    {
      // ||r - t v||^2 = ||r_perp||^2 + qa (t - t0)^2 with t0 = <r,v>/qa.
      const double qa = v.squaredNorm();
      if (qa > 0.0) {
        const double t0 = r.dot(v) / qa;
        const double perp2 = (r - t0 * v).squaredNorm();
        if (perp2 <= sigma * sigma) {
          const double root = t0 - std::sqrt((sigma * sigma - perp2) / qa);
          if (root >= 0.0 && root <= gamma) { gamma = root; event = 3; }
        }
      }
    }
    for (long t = 0; t < k; ++t) u(active[static_cast<std::size_t>(t)]) += gamma * d(t);
    r -= gamma * v;
    c -= gamma * a;
    lambda -= gamma;
    last_added = -1;
    last_dropped = -1;
    if (opts.verbosity > 1 && step % 100 == 0) {
      std::cerr << "homotopy step=" << step << " active=" << k << " lambda=" << lambda << " res=" << r.norm() << '\n';
    }
    if (event == 3 || r.norm() <= sigma) {
      converged = true;
      break;
    }
    if (event == 0) break;
    if (event == 1) {
      if (try_add(which)) last_added = which;
    } else {
      last_dropped = active[static_cast<std::size_t>(which)];
      dropped_sign = signs(which);
      drop(which);
    }
  }
  result.x = u.cwiseQuotient(w);
  r = y - A * result.x;
  result.dual_image = lambda > 0.0 ? Eigen::VectorXd(A.transpose() * r / lambda) : Eigen::VectorXd::Zero(n);
  result.report.iterations = std::min(step, opts.max_iters);
  result.report.primal_residual = r.norm();
  result.report.objective = weighted_l1(result.x, w);
  if (converged && result.report.primal_residual <= sigma * (1.0 + 1e-6) + 1e-13 * y.norm()) {
    result.report.status = SolveStatus::Converged;
  } else {
    result.report.status = step > opts.max_iters ? SolveStatus::MaxIters : SolveStatus::Infeasible;
  }
  return result;
}

}  // namespace

template <class Scalar>
SolveResult<Scalar> weighted_basis_pursuit(const MeasurementOperator<Scalar>& A, const Vec<Scalar>& y,
                                           const Eigen::VectorXd& w, const SolveOptions& opts) {
  check_options(opts);
  check_weights(w, A.cols());
  if (y.size() != A.rows()) throw ShapeError("weighted_basis_pursuit: y length does not match operator rows");
  if constexpr (std::is_same_v<Scalar, double>) {
    if (opts.bp_method != BpMethod::DouglasRachford) return homotopy_bp(A, y, w, opts);
  } else {
    if (opts.bp_method == BpMethod::Homotopy) throw UnsupportedError("homotopy basis pursuit needs a real operator");
  }
  return douglas_rachford_bp(A, y, w, opts);
}

template <class Scalar>
SolveResult<Scalar> basis_pursuit(const MeasurementOperator<Scalar>& A, const Vec<Scalar>& y,
                                  const SolveOptions& opts) {
  return weighted_basis_pursuit(A, y, Eigen::VectorXd::Ones(A.cols()), opts);
}

template <class Scalar>
SolveResult<Scalar> weighted_sqrt_lasso(const MeasurementOperator<Scalar>& A, const Vec<Scalar>& y,
                                        const Eigen::VectorXd& w, double lambda, const SolveOptions& opts) {
  check_options(opts);
  check_weights(w, A.cols());
  if (!(lambda > 0.0)) throw PreconditionError("weighted_sqrt_lasso: lambda must be positive");
  if (y.size() != A.rows()) throw ShapeError("weighted_sqrt_lasso: y length does not match operator rows");

  SolveResult<Scalar> result;
  const double op_norm = A.norm();
  Vec<Scalar> x = Vec<Scalar>::Zero(A.cols());
  Vec<Scalar> Ax = Vec<Scalar>::Zero(A.rows());
  if (op_norm == 0.0 || y.norm() == 0.0) {
    result.x = x;
    result.report.iterations = 0;
    result.report.primal_residual = y.norm();
    result.report.objective = y.norm();
    result.report.status = SolveStatus::Converged;
    return result;
  }
  // Dual iterates live in {||p|| <= 1, |A* p| <= lambda w}; balancing the
  // steps against that scale keeps the iteration count flat in lambda.
  const double dual_scale = lambda * w.mean();
  const double ratio = opts.step_ratio * dual_scale * dual_scale;
  const double tau = 0.99 / (op_norm * std::sqrt(ratio));
  const double sigma = 0.99 * std::sqrt(ratio) / op_norm;
  const Eigen::VectorXd thresholds = (tau * lambda) * w;

  Vec<Scalar> p = Vec<Scalar>::Zero(A.rows());
  Vec<Scalar> Axbar = Ax;
  Vec<Scalar> best_x = x;
  double best = y.norm();
  double best_dual = 0.0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= opts.max_iters; ++it) {
    p += sigma * (Axbar - y);
    const double pn = p.norm();
    if (pn > 1.0) p /= pn;
    const Vec<Scalar> Atp = A.adjoint(p);
    // p scaled into the dual feasible set bounds the optimum from below.
    const double excess = (Atp.cwiseAbs().array() / (lambda * w.array())).maxCoeff();
    best_dual = std::max(best_dual, -std::real(p.dot(y)) / std::max(1.0, excess));
    Vec<Scalar> x_new = soft_threshold<Scalar>(x - tau * Atp, thresholds);
    Vec<Scalar> Ax_new = A.apply(x_new);
    Axbar = 2.0 * Ax_new - Ax;
    x = std::move(x_new);
    Ax = std::move(Ax_new);
    const double objective = lambda * weighted_l1(x, w) + (Ax - y).norm();
    if (objective < best) {
      best = objective;
      best_x = x;
    }
    if (opts.verbosity > 1 && it % 100 == 0) {
      std::cerr << "srlasso it=" << it << " obj=" << objective << " dual=" << best_dual << '\n';
    }
    if (best - best_dual <= opts.opt_tol * best) {
      converged = true;
      break;
    }
  }
  result.x = best_x;
  result.report.iterations = std::min(it, opts.max_iters);
  result.report.primal_residual = (A.apply(best_x) - y).norm();
  result.report.objective = lambda * weighted_l1(best_x, w) + result.report.primal_residual;
  result.report.status = converged ? SolveStatus::Converged : SolveStatus::MaxIters;
  return result;
}

template SolveResult<double> weighted_basis_pursuit(const RealOperator&, const Vec<double>&, const Eigen::VectorXd&,
                                                    const SolveOptions&);
template SolveResult<std::complex<double>> weighted_basis_pursuit(const ComplexOperator&,
                                                                  const Vec<std::complex<double>>&,
                                                                  const Eigen::VectorXd&, const SolveOptions&);
template SolveResult<double> basis_pursuit(const RealOperator&, const Vec<double>&, const SolveOptions&);
template SolveResult<std::complex<double>> basis_pursuit(const ComplexOperator&, const Vec<std::complex<double>>&,
                                                         const SolveOptions&);
template SolveResult<double> weighted_sqrt_lasso(const RealOperator&, const Vec<double>&, const Eigen::VectorXd&,
                                                 double, const SolveOptions&);
template SolveResult<std::complex<double>> weighted_sqrt_lasso(const ComplexOperator&,
                                                               const Vec<std::complex<double>>&,
                                                               const Eigen::VectorXd&, double, const SolveOptions&);

OracleResult oracle_min_l1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w, int s_max) {
  const long n = A.cols();
  if (n > 12) throw CapError("oracle_min_l1: at most 12 columns");
  if (s_max < 0 || s_max > 4) throw CapError("oracle_min_l1: s_max must be in 0..4");
  if (y.size() != A.rows() || w.size() != n) throw ShapeError("oracle_min_l1: dimension mismatch");
  check_weights(w, n);

  OracleResult out;
  out.x = Eigen::VectorXd::Zero(n);
  out.objective = std::numeric_limits<double>::infinity();
  const double tol = 1e-9 * std::max(1.0, y.norm());
  if (y.norm() <= tol) {
    out.objective = 0.0;
    out.status = SolveStatus::Converged;
    out.supports_checked = 1;
    return out;
  }
  for (long mask = 1; mask < (1L << n); ++mask) {
    const int k = std::popcount(static_cast<unsigned long>(mask));
    if (k > s_max) continue;
    ++out.supports_checked;
    std::vector<long> cols;
    for (long j = 0; j < n; ++j) {
      if (mask & (1L << j)) cols.push_back(j);
    }
    Eigen::MatrixXd As(A.rows(), k);
    for (int c = 0; c < k; ++c) As.col(c) = A.col(cols[static_cast<std::size_t>(c)]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    if (qr.rank() < k) continue;  // not a vertex
    const Eigen::VectorXd zs = qr.solve(y);
    if ((As * zs - y).norm() > tol) continue;
    double objective = 0.0;
    for (int c = 0; c < k; ++c) objective += w(cols[static_cast<std::size_t>(c)]) * std::abs(zs(c));
    if (objective < out.objective) {
      out.objective = objective;
      out.x.setZero();
      for (int c = 0; c < k; ++c) out.x(cols[static_cast<std::size_t>(c)]) = zs(c);
      out.status = SolveStatus::Converged;
    }
  }
  if (out.status == SolveStatus::Infeasible) out.objective = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace wavecs
