#include "wavecs/operators.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "wavecs/dwt.hpp"
#include "wavecs/errors.hpp"
#include "wavecs/fourier.hpp"
#include "wavecs/rng.hpp"

namespace wavecs {

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Dense: return "dense";
    case OperatorKind::GaussianDense: return "gaussian";
    case OperatorKind::TwoLevelDirectPlusGaussian: return "two_level";
    case OperatorKind::SubsampledScaledGramian: return "subsampled_gramian";
  }
  return "unknown";
}

template <class Scalar>
struct MeasurementOperator<Scalar>::Cache {
  std::once_flag norm_once;
  double norm = 0.0;
  std::once_flag gram_once;
  Eigen::LDLT<Matrix> gram;
};

template <class Scalar>
MeasurementOperator<Scalar>::MeasurementOperator(OperatorKind kind, long rows, long cols, Map apply, Map adjoint,
                                                 Map row_gram_solve)
    : kind_(kind),
      rows_(rows),
      cols_(cols),
      apply_(std::move(apply)),
      adjoint_(std::move(adjoint)),
      row_gram_solve_(std::move(row_gram_solve)),
      cache_(std::make_shared<Cache>()) {
  if (rows < 0 || cols < 1) throw ShapeError("MeasurementOperator: invalid dimensions");
}

template <class Scalar>
MeasurementOperator<Scalar> MeasurementOperator<Scalar>::from_matrix(Matrix matrix, OperatorKind kind) {
  auto shared = std::make_shared<const Matrix>(std::move(matrix));
  MeasurementOperator op(
      kind, shared->rows(), shared->cols(), [shared](const Vector& x) -> Vector { return (*shared) * x; },
      [shared](const Vector& y) -> Vector { return shared->adjoint() * y; });
  op.matrix_ = shared;
  return op;
}

template <class Scalar>
typename MeasurementOperator<Scalar>::Vector MeasurementOperator<Scalar>::apply(const Vector& x) const {
  if (x.size() != cols_) throw ShapeError("MeasurementOperator::apply: length mismatch");
  return apply_(x);
}

template <class Scalar>
typename MeasurementOperator<Scalar>::Vector MeasurementOperator<Scalar>::adjoint(const Vector& y) const {
  if (y.size() != rows_) throw ShapeError("MeasurementOperator::adjoint: length mismatch");
  return adjoint_(y);
}

template <class Scalar>
typename MeasurementOperator<Scalar>::Matrix MeasurementOperator<Scalar>::dense() const {
  if (matrix_) return *matrix_;
  Matrix adj(cols_, rows_);
  Vector e = Vector::Zero(rows_);
  for (long i = 0; i < rows_; ++i) {
    e(i) = Scalar(1);
    adj.col(i) = adjoint_(e);
    e(i) = Scalar(0);
  }
  return adj.adjoint();
}

template <class Scalar>
typename MeasurementOperator<Scalar>::Vector MeasurementOperator<Scalar>::row_gram_solve(const Vector& v) const {
  if (v.size() != rows_) throw ShapeError("MeasurementOperator::row_gram_solve: length mismatch");
  if (row_gram_solve_) return row_gram_solve_(v);
  std::call_once(cache_->gram_once, [this] {
    const Matrix A = dense();
    cache_->gram.compute(A * A.adjoint());
  });
  return cache_->gram.solve(v);
}

template <class Scalar>
double MeasurementOperator<Scalar>::norm() const {
  std::call_once(cache_->norm_once, [this] { cache_->norm = power_norm(*this); });
  return cache_->norm;
}

template <class Scalar>
double power_norm(const MeasurementOperator<Scalar>& op, int iterations) {
  using Vector = typename MeasurementOperator<Scalar>::Vector;
  CounterRng rng(0x706f776572ULL);
  Vector x(op.cols());
  for (long i = 0; i < x.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      x(i) = rng.normal();
    } else {
      x(i) = Scalar(rng.normal(), rng.normal());
    }
  }
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector y = op.adjoint(op.apply(x));
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    estimate = std::sqrt(n);
    x = y / n;
  }
  return estimate;
}

template class MeasurementOperator<double>;
template class MeasurementOperator<std::complex<double>>;
template double power_norm(const MeasurementOperator<double>&, int);
template double power_norm(const MeasurementOperator<std::complex<double>>&, int);

Eigen::MatrixXd gaussian_matrix(long m, long N, std::uint64_t seed) {
  if (m < 1 || N < 1) throw ShapeError("gaussian_matrix: dimensions must be >= 1");
  CounterRng rng(seed, 0x6761757373ULL);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd A(m, N);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < N; ++j) A(i, j) = scale * rng.normal();
  }
  return A;
}

RealOperator gaussian_operator(long m, long N, std::uint64_t seed) {
  return RealOperator::from_matrix(gaussian_matrix(m, N, seed), OperatorKind::GaussianDense);
}

RealOperator two_level_operator(long N1, long N2, long m2, std::uint64_t seed) {
  if (N1 < 0 || N2 <= N1) throw ShapeError("two_level_operator: need 0 <= N1 < N2");
  if (m2 < 1) throw ShapeError("two_level_operator: m2 must be >= 1");
  auto G = std::make_shared<const Eigen::MatrixXd>(gaussian_matrix(m2, N2 - N1, seed));
  auto gram = std::make_shared<const Eigen::LDLT<Eigen::MatrixXd>>((*G) * G->transpose());
  using V = Eigen::VectorXd;
  return RealOperator(
      OperatorKind::TwoLevelDirectPlusGaussian, N1 + m2, N2,
      [G, N1, N2, m2](const V& x) -> V {
        V out(N1 + m2);
        out.head(N1) = x.head(N1);
        out.tail(m2) = (*G) * x.segment(N1, N2 - N1);
        return out;
      },
      [G, N1, N2, m2](const V& y) -> V {
        V out(N2);
        out.head(N1) = y.head(N1);
        out.tail(N2 - N1) = G->transpose() * y.tail(m2);
        return out;
      },
      [gram, N1, m2](const V& v) -> V {
        V out(N1 + m2);
        out.head(N1) = v.head(N1);
        out.tail(m2) = gram->solve(v.tail(m2));
        return out;
      });
}

ComplexOperator subsampled_gramian_operator(const CrossGramian& U, const SamplingPattern& pattern) {
  long max_natural = 0;
  for (long n : pattern.naturals) max_natural = std::max(max_natural, n);
  if (max_natural > U.rows()) throw ShapeError("subsampled_gramian_operator: pattern index beyond Gramian rows");
  const std::vector<double> d = scaling_weights(pattern.scheme, U.rows());
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(pattern.size()), U.cols());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const long n = pattern.naturals[i];
    A.row(static_cast<Eigen::Index>(i)) = d[static_cast<std::size_t>(n - 1)] * U.entries.row(n - 1);
  }
  return ComplexOperator::from_matrix(std::move(A), OperatorKind::SubsampledScaledGramian);
}

ComplexOperator fourier_operator(const WaveletSpec& spec, long M, const SamplingPattern& pattern) {
  if (M < (1L << spec.j0) || !std::has_single_bit(static_cast<unsigned long>(M))) {
    throw ShapeError("fourier_operator: M must be a power of two >= 2^j0");
  }
  long max_natural = 1;
  for (long n : pattern.naturals) {
    if (n < 1) throw ShapeError("fourier_operator: natural index must be >= 1");
    max_natural = std::max(max_natural, n);
  }
  const long L = static_cast<long>(std::bit_ceil(static_cast<unsigned long>(std::max(M, max_natural))));
  const int JL = exact_log2(static_cast<std::size_t>(L));
  const std::vector<double> d = scaling_weights(pattern.scheme, max_natural);

  struct Plan {
    long M;
    long L;
    int JL;
    WaveletSpec spec;
    std::vector<long> bins;
    std::vector<std::complex<double>> scale;
  };
  auto plan = std::make_shared<Plan>();
  plan->M = M;
  plan->L = L;
  plan->JL = JL;
  plan->spec = spec;
  for (long n : pattern.naturals) {
    const long w = FourierIndexMap::frequency(n);
    plan->bins.push_back(((w % L) + L) % L);
    const double di = d[static_cast<std::size_t>(n - 1)];
    plan->scale.push_back(di * scaling_hat(spec, 2.0 * std::numbers::pi * static_cast<double>(w) / static_cast<double>(L)) /
                          std::sqrt(static_cast<double>(L)));
  }
  using V = Eigen::VectorXcd;
  const long rows = static_cast<long>(pattern.size());

  auto apply = [plan](const V& z) -> V {
    thread_local Eigen::FFT<double> fft;
    std::vector<double> re(static_cast<std::size_t>(plan->M));
    std::vector<double> im(static_cast<std::size_t>(plan->M));
    for (long i = 0; i < plan->M; ++i) {
      re[static_cast<std::size_t>(i)] = z(i).real();
      im[static_cast<std::size_t>(i)] = z(i).imag();
    }
    const std::vector<double> fine_re = synthesize_to_scale(re, plan->spec, plan->JL);
    const std::vector<double> fine_im = synthesize_to_scale(im, plan->spec, plan->JL);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(plan->L));
    for (std::size_t n = 0; n < buf.size(); ++n) buf[n] = {fine_re[n], fine_im[n]};
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, buf);
    V y(static_cast<Eigen::Index>(plan->bins.size()));
    for (std::size_t i = 0; i < plan->bins.size(); ++i) {
      y(static_cast<Eigen::Index>(i)) = plan->scale[i] * spectrum[static_cast<std::size_t>(plan->bins[i])];
    }
    return y;
  };

  auto adjoint = [plan](const V& y) -> V {
    thread_local Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(plan->L), 0.0);
    for (std::size_t i = 0; i < plan->bins.size(); ++i) {
      buf[static_cast<std::size_t>(plan->bins[i])] += std::conj(plan->scale[i]) * y(static_cast<Eigen::Index>(i));
    }
    std::vector<std::complex<double>> signal;
    fft.inv(signal, buf);
    std::vector<double> re(static_cast<std::size_t>(plan->L));
    std::vector<double> im(static_cast<std::size_t>(plan->L));
    for (std::size_t n = 0; n < re.size(); ++n) {
      re[n] = signal[n].real();
      im[n] = signal[n].imag();
    }
    std::vector<double> work(re.size());
    dwt_inplace(re, work, plan->spec);
    dwt_inplace(im, work, plan->spec);
    V x(plan->M);
    for (long i = 0; i < plan->M; ++i) x(i) = {re[static_cast<std::size_t>(i)], im[static_cast<std::size_t>(i)]};
    return x;
  };

  ComplexOperator::Map gram_solve;
  if (L == M) {
    // Synthesis is orthogonal here, so A A* couples only rows that hit the
    // same DFT bin: each group is the rank-one block L s s*.
    std::map<long, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < plan->bins.size(); ++i) groups[plan->bins[i]].push_back(i);
    auto members = std::make_shared<std::vector<std::vector<std::size_t>>>();
    for (auto& [bin, idx] : groups) members->push_back(std::move(idx));
    gram_solve = [plan, members](const V& v) -> V {
      V out = V::Zero(v.size());
      for (const auto& group : *members) {
        std::complex<double> proj = 0.0;
        double s2 = 0.0;
        for (std::size_t i : group) {
          proj += std::conj(plan->scale[i]) * v(static_cast<Eigen::Index>(i));
          s2 += std::norm(plan->scale[i]);
        }
        if (s2 == 0.0) continue;
        const std::complex<double> c = proj / (static_cast<double>(plan->L) * s2 * s2);
        for (std::size_t i : group) out(static_cast<Eigen::Index>(i)) = plan->scale[i] * c;
      }
      return out;
    };
  }
  return ComplexOperator(OperatorKind::SubsampledScaledGramian, rows, M, std::move(apply), std::move(adjoint),
                         std::move(gram_solve));
}

}  // namespace wavecs
