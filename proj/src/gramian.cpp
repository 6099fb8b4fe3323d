#include "wavecs/gramian.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "wavecs/dwt.hpp"
#include "wavecs/errors.hpp"
#include "wavecs/fourier.hpp"

namespace wavecs {
namespace {

constexpr long kDenseEntryCap = 1L << 26;

bool is_pow2(long v) { return v > 0 && std::has_single_bit(static_cast<unsigned long>(v)); }

long positive_mod(long a, long n) {
  const long r = a % n;
  return r < 0 ? r + n : r;
}

std::vector<long> dyadic_level_ends(int j0, long size) {
  std::vector<long> ends;
  for (int k = 1;; ++k) {
    const long end = 1L << (j0 + k);
    if (end >= size) {
      ends.push_back(size);
      break;
    }
    ends.push_back(end);
  }
  return ends;
}

}  // namespace

std::pair<long, long> BandPartition::natural_range(int k) const {
  if (k < 1 || k > levels()) throw PreconditionError("BandPartition: level out of range");
  const long lo = k == 1 ? 1 : level_ends[static_cast<std::size_t>(k - 2)] + 1;
  return {lo, level_ends[static_cast<std::size_t>(k - 1)]};
}

BandPartition dyadic_bands(int j0, int r) {
  if (r < 1) throw PreconditionError("dyadic_bands: r must be >= 1");
  BandPartition out;
  out.j0 = j0;
  std::vector<long> first;
  for (long w = -(1L << j0) + 1; w <= (1L << j0); ++w) first.push_back(w);
  out.bands.push_back(std::move(first));
  out.level_ends.push_back(1L << (j0 + 1));
  for (int k = 1; k < r; ++k) {
    std::vector<long> band;
    for (long w = -(1L << (j0 + k)) + 1; w <= -(1L << (j0 + k - 1)); ++w) band.push_back(w);
    for (long w = (1L << (j0 + k - 1)) + 1; w <= (1L << (j0 + k)); ++w) band.push_back(w);
    out.bands.push_back(std::move(band));
    out.level_ends.push_back(1L << (j0 + k + 1));
  }
  return out;
}

GramianGenerator::GramianGenerator(const WaveletSpec& spec, long N, long M, int oversample)
    : j0_(spec.j0), N_(N), M_(M) {
  if (N < 1) throw ShapeError("GramianGenerator: N must be >= 1");
  if (!is_pow2(M) || M < (1L << spec.j0)) {
    throw ShapeError("GramianGenerator: M must be a power of two >= 2^j0");
  }
  if (!is_pow2(oversample)) throw PreconditionError("GramianGenerator: oversample must be a power of two");
  const long base_len = std::max<long>(std::bit_ceil(static_cast<unsigned long>(N)), M);
  L_ = static_cast<long>(oversample) * base_len;
  const int JL = exact_log2(static_cast<std::size_t>(L_));
  const int JM = exact_log2(static_cast<std::size_t>(M));

  twiddle_.resize(static_cast<std::size_t>(M));
  for (long t = 0; t < M; ++t) twiddle_[static_cast<std::size_t>(t)] = std::polar(1.0, -2.0 * std::numbers::pi * t / M);

  // Fine-scale correction phi_hat(2 pi w / L) / sqrt(L) turns the DFT of the
  // scale-JL coefficients into exact inner products with gamma_w.
  std::vector<std::complex<double>> correction(static_cast<std::size_t>(N));
  for (long nat = 1; nat <= N; ++nat) {
    const long w = FourierIndexMap::frequency(nat);
    correction[static_cast<std::size_t>(nat - 1)] =
        scaling_hat(spec, 2.0 * std::numbers::pi * static_cast<double>(w) / static_cast<double>(L_)) /
        std::sqrt(static_cast<double>(L_));
  }

  Eigen::FFT<double> fft;
  const int generators = 1 + (JM - spec.j0);
  spectra_.resize(static_cast<std::size_t>(generators));
  std::vector<double> unit(static_cast<std::size_t>(M));
  for (int g = 0; g < generators; ++g) {
    std::fill(unit.begin(), unit.end(), 0.0);
    const std::size_t position = g == 0 ? 0 : (std::size_t{1} << (spec.j0 + g - 1));
    unit[position] = 1.0;
    const std::vector<double> fine = synthesize_to_scale(unit, spec, JL);
    std::vector<std::complex<double>> in(fine.begin(), fine.end());
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    auto& spectrum = spectra_[static_cast<std::size_t>(g)];
    spectrum.resize(static_cast<std::size_t>(N));
    for (long nat = 1; nat <= N; ++nat) {
      const long w = FourierIndexMap::frequency(nat);
      spectrum[static_cast<std::size_t>(nat - 1)] =
          out[static_cast<std::size_t>(positive_mod(w, L_))] * correction[static_cast<std::size_t>(nat - 1)];
    }
  }
}

std::complex<double> GramianGenerator::base(int generator, long natural) const {
  return spectra_[static_cast<std::size_t>(generator)][static_cast<std::size_t>(natural - 1)];
}

std::complex<double> GramianGenerator::entry(long natural, long col) const {
  if (natural < 1 || natural > N_ || col < 0 || col >= M_) throw ShapeError("GramianGenerator: index out of range");
  const long w = FourierIndexMap::frequency(natural);
  int j = j0_;
  long k = col;
  int g = 0;
  if (col >= (1L << j0_)) {
    j = std::bit_width(static_cast<unsigned long>(col)) - 1;
    k = col - (1L << j);
    g = 1 + j - j0_;
  }
  const long period = 1L << j;
  const long t = positive_mod(positive_mod(w, period) * k, period) * (M_ / period);
  return base(g, natural) * twiddle_[static_cast<std::size_t>(t)];
}

Eigen::MatrixXcd GramianGenerator::rows(std::span<const long> naturals, std::span<const double> row_scale) const {
  if (!row_scale.empty() && row_scale.size() != naturals.size()) {
    throw ShapeError("GramianGenerator::rows: scale length mismatch");
  }
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(naturals.size()), M_);
  for (std::size_t i = 0; i < naturals.size(); ++i) {
    const long nat = naturals[i];
    if (nat < 1 || nat > N_) throw ShapeError("GramianGenerator::rows: natural index out of range");
    const long w = FourierIndexMap::frequency(nat);
    const double s = row_scale.empty() ? 1.0 : row_scale[i];
    const auto row = static_cast<Eigen::Index>(i);
    // scaling block: j = j0
    {
      const long period = 1L << j0_;
      const long step = M_ / period;
      const std::complex<double> b = base(0, nat) * s;
      const long wm = positive_mod(w, period);
      for (long k = 0; k < period; ++k) {
        out(row, k) = b * twiddle_[static_cast<std::size_t>(((wm * k) % period) * step)];
      }
    }
    for (long j = j0_; (1L << j) < M_; ++j) {
      const long period = 1L << j;
      const long step = M_ / period;
      const std::complex<double> b = base(static_cast<int>(1 + j - j0_), nat) * s;
      const long wm = positive_mod(w, period);
      for (long k = 0; k < period; ++k) {
        out(row, period + k) = b * twiddle_[static_cast<std::size_t>(((wm * k) % period) * step)];
      }
    }
  }
  return out;
}

CrossGramian cross_gramian(const WaveletSpec& spec, long N, long M, int oversample) {
  if (!is_pow2(N)) throw ShapeError("cross_gramian: N must be a power of two");
  if (!is_pow2(M) || M < (1L << spec.j0)) throw ShapeError("cross_gramian: M must be a power of two >= 2^j0");
  if (N * M > kDenseEntryCap) {
    throw CapError("cross_gramian: " + std::to_string(N) + " x " + std::to_string(M) +
                   " exceeds the dense cap of 2^26 entries");
  }
  const GramianGenerator gen(spec, N, M, oversample);
  std::vector<long> naturals(static_cast<std::size_t>(N));
  for (long i = 0; i < N; ++i) naturals[static_cast<std::size_t>(i)] = i + 1;
  CrossGramian U;
  U.entries = gen.rows(naturals);
  U.j0 = spec.j0;
  U.sampling_levels = dyadic_level_ends(spec.j0, N);
  U.sparsity_levels = dyadic_level_ends(spec.j0, M);
  return U;
}

std::complex<double> haar_entry(int j, long k, long n, bool scaling) {
  const double omega = 2.0 * std::numbers::pi * static_cast<double>(n) / std::ldexp(1.0, j);
  const std::complex<double> I(0.0, 1.0);
  std::complex<double> hat;
  if (scaling) {
    hat = n == 0 ? std::complex<double>(1.0) : (1.0 - std::exp(-I * omega)) / (I * omega);
  } else {
    const std::complex<double> a = 1.0 - std::exp(-I * omega / 2.0);
    hat = n == 0 ? std::complex<double>(0.0) : a * a / (I * omega);
  }
  const long period = 1L << j;
  const double phase = -2.0 * std::numbers::pi * static_cast<double>(positive_mod(n * k, period)) / period;
  return std::ldexp(1.0, 0) / std::sqrt(std::ldexp(1.0, j)) * hat * std::polar(1.0, phase);
}

namespace {

std::pair<long, long> level_bounds(const std::vector<long>& ends, int k) {
  if (k < 1 || k > static_cast<int>(ends.size())) throw PreconditionError("local_coherence: level out of range");
  const long lo = k == 1 ? 0 : ends[static_cast<std::size_t>(k - 2)];
  return {lo, ends[static_cast<std::size_t>(k - 1)]};
}

Eigen::MatrixXcd gram_matrix(const CrossGramian& U, long N, long M) {
  if (M > N) throw PreconditionError("balancing_constant: requires M <= N");
  if (N > U.rows() || M > U.cols()) throw ShapeError("balancing_constant: Gramian section too small");
  const auto block = U.entries.topLeftCorner(N, M);
  return block.adjoint() * block;
}

}  // namespace

double local_coherence(const CrossGramian& U, int k, int l) {
  const auto [r0, r1] = level_bounds(U.sampling_levels, k);
  const auto [c0, c1] = level_bounds(U.sparsity_levels, l);
  const double peak = U.entries.block(r0, c0, r1 - r0, c1 - c0).cwiseAbs2().maxCoeff();
  return static_cast<double>(r1 - r0) * peak;
}

Eigen::VectorXd gram_spectrum(const CrossGramian& U, long N, long M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram_matrix(U, N, M), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double balancing_constant(const CrossGramian& U, long N, long M) { return gram_spectrum(U, N, M)(0); }

Eigen::MatrixXcd gram_sqrt(const CrossGramian& U, long N, long M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram_matrix(U, N, M));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

namespace {

double estimate_q_uncached(const WaveletSpec& spec) {
  // |m0(w)|^2 = sum_t a_t cos(t w) from the filter autocorrelation.
  const int len = spec.length();
  std::vector<double> acf(static_cast<std::size_t>(len), 0.0);
  for (int t = 0; t < len; ++t) {
    for (int i = 0; i + t < len; ++i) acf[static_cast<std::size_t>(t)] += spec.h[static_cast<std::size_t>(i)] * spec.h[static_cast<std::size_t>(i + t)];
  }
  auto m0_sq = [&](double w) {
    double v = acf[0];
    for (int t = 1; t < len; ++t) v += 2.0 * acf[static_cast<std::size_t>(t)] * std::cos(t * w);
    return 0.5 * v;
  };
  auto log_phi_hat = [&](double w) {
    double acc = 0.0;
    for (double arg = w / 2.0; arg > 1e-10; arg /= 2.0) acc += std::log(std::max(m0_sq(arg), 1e-300));
    return 0.5 * acc;
  };

  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = 4; k < 16; ++k) {
    const double lo = std::ldexp(1.0, k);
    // sample spacing below the 4 pi period of the finest oscillating factor
    const long samples = std::max<long>(256, static_cast<long>(lo));
    double best = -1e300;
    for (long s = 0; s <= samples; ++s) best = std::max(best, log_phi_hat(lo + lo * s / samples));
    xs.push_back(std::log(lo));
    ys.push_back(best);
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::max(0.0, -slope - 1.0);
}

}  // namespace

double estimate_smoothness_q(const WaveletSpec& spec) {
  static std::mutex mutex;
  static std::map<std::vector<double>, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(spec.h); it != cache.end()) return it->second;
  }
  const double q = estimate_q_uncached(spec);
  std::lock_guard lock(mutex);
  cache.emplace(spec.h, q);
  return q;
}

}  // namespace wavecs
