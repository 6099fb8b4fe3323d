#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "wavecs/gramian.hpp"
#include "wavecs/sampling.hpp"
#include "wavecs/wavelet.hpp"

namespace wavecs {

enum class OperatorKind { Dense, GaussianDense, TwoLevelDirectPlusGaussian, SubsampledScaledGramian };

std::string to_string(OperatorKind kind);

/// Linear map C^cols -> C^rows (or R) given by apply/adjoint closures.
///
/// Besides the two products the operator can solve with its row Gram matrix
/// A A*, which projection-based solvers need; when no closed form is supplied
/// the Gram matrix is assembled once (on first use) and factorized with LDLT,
/// giving the minimum-norm solution for rank-deficient A.
template <class Scalar>
class MeasurementOperator {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Map = std::function<Vector(const Vector&)>;

  MeasurementOperator(OperatorKind kind, long rows, long cols, Map apply, Map adjoint, Map row_gram_solve = {});

  static MeasurementOperator from_matrix(Matrix matrix, OperatorKind kind = OperatorKind::Dense);

  [[nodiscard]] OperatorKind kind() const { return kind_; }
  [[nodiscard]] long rows() const { return rows_; }
  [[nodiscard]] long cols() const { return cols_; }

  [[nodiscard]] Vector apply(const Vector& x) const;
  [[nodiscard]] Vector adjoint(const Vector& y) const;
  /// (A A*)^+ v.
  [[nodiscard]] Vector row_gram_solve(const Vector& v) const;
  /// Stored matrix for operators built from one, else nullptr.
  [[nodiscard]] const Matrix* stored_matrix() const { return matrix_.get(); }
  /// Dense matrix, materialized from the adjoint when not stored.
  [[nodiscard]] Matrix dense() const;

  /// Spectral norm estimate from 100 power iterations on A*A (cached).
  [[nodiscard]] double norm() const;

 private:
  struct Cache;

  OperatorKind kind_;
  long rows_;
  long cols_;
  Map apply_;
  Map adjoint_;
  Map row_gram_solve_;
  std::shared_ptr<const Matrix> matrix_;
  std::shared_ptr<Cache> cache_;
};

using RealOperator = MeasurementOperator<double>;
using ComplexOperator = MeasurementOperator<std::complex<double>>;

/// m x N matrix with i.i.d. N(0, 1/m) entries.
Eigen::MatrixXd gaussian_matrix(long m, long N, std::uint64_t seed);
RealOperator gaussian_operator(long m, long N, std::uint64_t seed);

/// Identity on coordinates [0, N1) stacked over an m2 x (N2 - N1) Gaussian
/// block (variance 1/m2) on coordinates [N1, N2).
RealOperator two_level_operator(long N1, long N2, long m2, std::uint64_t seed);

/// Rows of D U selected (with multiplicity) by the pattern, as a dense matrix.
ComplexOperator subsampled_gramian_operator(const CrossGramian& U, const SamplingPattern& pattern);

/// Same map applied through wavelet synthesis and an FFT, never forming U.
/// Columns are the first M canonical wavelet coefficients; M a power of two.
ComplexOperator fourier_operator(const WaveletSpec& spec, long M, const SamplingPattern& pattern);

/// Largest singular value by power iteration.
template <class Scalar>
double power_norm(const MeasurementOperator<Scalar>& op, int iterations = 100);

}  // namespace wavecs
