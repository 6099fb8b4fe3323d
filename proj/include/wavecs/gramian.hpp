#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "wavecs/wavelet.hpp"

namespace wavecs {

/// Dyadic frequency bands B_1 = {-2^j0+1..2^j0}, B_{k+1} = {-2^{j0+k}+1..-2^{j0+k-1}}
/// U {2^{j0+k-1}+1..2^{j0+k}}. In natural indexing band k is {N_{k-1}+1..N_k}
/// with N_k = 2^{j0+k}.
struct BandPartition {
  int j0 = 0;
  std::vector<std::vector<long>> bands;  // signed frequencies, ascending
  std::vector<long> level_ends;          // N_1..N_r

  [[nodiscard]] int levels() const { return static_cast<int>(bands.size()); }
  /// First and last natural index (1-based, inclusive) of band k (1-based).
  [[nodiscard]] std::pair<long, long> natural_range(int k) const;
};

BandPartition dyadic_bands(int j0, int r);

/// Leading N x M section of the Fourier-wavelet cross-Gramian
/// U_{ij} = <phi_j, gamma_i>, rows in natural Fourier order, columns in
/// canonical wavelet order.
struct CrossGramian {
  Eigen::MatrixXcd entries;
  int j0 = 0;
  std::vector<long> sampling_levels;  // N_k for the rows
  std::vector<long> sparsity_levels;  // M_k for the columns

  [[nodiscard]] long rows() const { return entries.rows(); }
  [[nodiscard]] long cols() const { return entries.cols(); }
};

/// Per-scale spectra from which any entry of U can be generated. Column
/// (scale j, shift k) at frequency w equals generator(j)[w] * e^{-2 pi i w k / 2^j}.
class GramianGenerator {
 public:
  /// Rows up to natural index N, `M` columns (powers of two, M >= 2^j0). The
  /// synthesis grid has oversample * max(N, M) points.
  GramianGenerator(const WaveletSpec& spec, long N, long M, int oversample = 16);

  [[nodiscard]] long columns() const { return M_; }
  /// Entry for natural row index `natural` (1-based) and canonical column `col` (0-based).
  [[nodiscard]] std::complex<double> entry(long natural, long col) const;
  /// Rows of U for the given natural indices (with repetition), optionally scaled.
  [[nodiscard]] Eigen::MatrixXcd rows(std::span<const long> naturals, std::span<const double> row_scale = {}) const;

 private:
  [[nodiscard]] std::complex<double> base(int generator, long frequency) const;

  int j0_;
  long N_;
  long M_;
  long L_;
  std::vector<std::complex<double>> twiddle_;  // e^{-2 pi i t / M}
  // generator 0: scaling function at j0; generator 1 + (j - j0): wavelet at scale j.
  std::vector<std::vector<std::complex<double>>> spectra_;
};

/// Dense N x M section. N and M must be powers of two >= 2^j0; `oversample`
/// a power of two. Throws ShapeError / CapError.
CrossGramian cross_gramian(const WaveletSpec& spec, long N, long M, int oversample = 16);

/// Closed-form Haar entry <psi^per_{j,k}, gamma_n> for integer frequency n;
/// with `scaling` the scaling function phi^per_{j,k} instead.
std::complex<double> haar_entry(int j, long k, long n, bool scaling = false);

/// (N_k - N_{k-1}) * max |U_ij|^2 over block (k, l); 1-based levels.
double local_coherence(const CrossGramian& U, int k, int l);

/// Smallest eigenvalue of the Gram matrix (P_M U* P_N U P_M); requires M <= N
/// and the first N rows / M columns of U to be present.
double balancing_constant(const CrossGramian& U, long N, long M);

/// Eigenvalues (ascending) of the same Gram matrix.
Eigen::VectorXd gram_spectrum(const CrossGramian& U, long N, long M);

/// Hermitian square root of P_M U* P_N U P_M.
Eigen::MatrixXcd gram_sqrt(const CrossGramian& U, long N, long M);

/// Decay exponent q of |phi_hat(w)| ~ w^{-1-q}: least-squares slope of the
/// per-octave maximum of log|phi_hat| against log w for w up to 2^16.
double estimate_smoothness_q(const WaveletSpec& spec);

}  // namespace wavecs
