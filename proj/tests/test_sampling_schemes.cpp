#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "wavecs/errors.hpp"
#include "wavecs/fourier.hpp"
#include "wavecs/function.hpp"
#include "wavecs/gramian.hpp"
#include "wavecs/operators.hpp"
#include "wavecs/rng.hpp"
#include "wavecs/sampling.hpp"

using namespace wavecs;
using cd = std::complex<double>;

namespace {

template <class Scalar>
double adjoint_gap(const MeasurementOperator<Scalar>& A, unsigned seed) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  auto draw = [&](long n) {
    Vec v(n);
    for (auto& e : v) {
      if constexpr (std::is_same_v<Scalar, double>) {
        e = nd(gen);
      } else {
        e = Scalar(nd(gen), nd(gen));
      }
    }
    return v;
  };
  const Vec x = draw(A.cols());
  const Vec y = draw(A.rows());
  const Scalar lhs = y.dot(A.apply(x));
  const Scalar rhs = A.adjoint(y).dot(x);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

}  // namespace

TEST_CASE("CounterRng") {
  CounterRng a(42, 3);
  CounterRng b(42, 3);
  CounterRng c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    CHECK(va == b());
    differs = differs || va != c();
  }
  CHECK(differs);
  CounterRng u(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.uniform_index(5) < 5);
  }
  CHECK(mix_seed({1, 2}) != mix_seed({2, 1}));
}

TEST_CASE("LevelScheme invariants") {
  CHECK_NOTHROW(dyadic_scheme(0, {2, 2, 4, 8}, 4, true));
  CHECK_NOTHROW(dyadic_scheme(0, {2, 2, 3, 8}, 2, false));
  CHECK_THROWS_AS(dyadic_scheme(0, {2, 2, 3, 8}, 2, true), PreconditionError);
  CHECK_THROWS_AS(dyadic_scheme(0, {2, 1, 3, 4}, 2, true), PreconditionError);
  CHECK_THROWS_AS(dyadic_scheme(0, {2, 2, 5, 4}, 2, false), PreconditionError);
  const LevelScheme s = dyadic_scheme(2, {8, 3, 5}, 1, true);
  CHECK(s.level_ends == std::vector<long>{8, 16, 32});
  CHECK(s.level_begin(2) == 8);
  CHECK(s.level_size(3) == 16);
  CHECK(s.total() == 16);
  CHECK(s.saturated(1));
  CHECK_FALSE(s.saturated(2));
}

TEST_CASE("draw_multilevel") {
  SUBCASE("full saturation enumerates every index once") {
    const SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 4, 8}, 4, true), 9);
    std::vector<long> expect(16);
    for (long i = 0; i < 16; ++i) expect[static_cast<std::size_t>(i)] = i + 1;
    CHECK(p.naturals == expect);
  }
  SUBCASE("m_k = 0 above saturation leaves the level empty") {
    const SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 0, 0}, 2, true), 9);
    CHECK(p.size() == 4);
    for (long n : p.naturals) CHECK(n <= 4);
  }
  SUBCASE("levels hold exactly m_k indices from their range") {
    const LevelScheme s = dyadic_scheme(1, {4, 4, 3, 6, 9}, 2, true);
    const SamplingPattern p = draw_multilevel(s, 123);
    for (int k = 1; k <= s.levels(); ++k) CHECK(p.count(k) == s.m_local[static_cast<std::size_t>(k - 1)]);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p.naturals[i] > s.level_begin(p.levels[i]));
      CHECK(p.naturals[i] <= s.level_ends[static_cast<std::size_t>(p.levels[i] - 1)]);
    }
  }
  SUBCASE("determinism") {
    const LevelScheme s = dyadic_scheme(0, {2, 1, 3, 5, 7}, 1, true);
    CHECK(draw_multilevel(s, 77).naturals == draw_multilevel(s, 77).naturals);
    CHECK(draw_multilevel(s, 77).naturals != draw_multilevel(s, 78).naturals);
  }
  SUBCASE("duplicates are kept, deduplicate removes them") {
    const SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 4, 8, 15}, 1, false), 5);
    const std::set<long> unique(p.naturals.begin(), p.naturals.end());
    CHECK(p.size() == 31);
    const SamplingPattern d = deduplicate(p);
    CHECK(d.size() == unique.size());
    CHECK(std::set<long>(d.naturals.begin(), d.naturals.end()) == unique);
  }
  SUBCASE("marginal uniformity") {
    LevelScheme s;
    s.level_ends = {8};
    s.m_local = {1};
    std::vector<long> hits(8, 0);
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) ++hits[static_cast<std::size_t>(draw_multilevel(s, mix_seed({2024, static_cast<std::uint64_t>(t)})).naturals[0] - 1)];
    const double sigma = std::sqrt(draws * (1.0 / 8) * (7.0 / 8));
    for (long h : hits) CHECK(std::abs(h - draws / 8.0) <= 4 * sigma);
  }
}

TEST_CASE("draw_symmetric") {
  const LevelScheme s = dyadic_scheme(1, {4, 4, 6, 10, 12}, 2, true);
  const SamplingPattern p = draw_symmetric(s, 31);
  for (int k = 1; k <= s.levels(); ++k) CHECK(p.count(k) == s.m_local[static_cast<std::size_t>(k - 1)]);
  std::multiset<long> freqs;
  for (long n : p.naturals) freqs.insert(FourierIndexMap::frequency(n));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.levels[i] <= 2) continue;
    const long w = FourierIndexMap::frequency(p.naturals[i]);
    CHECK(freqs.count(1 - w) == freqs.count(w));
    CHECK(p.naturals[i] > s.level_begin(p.levels[i]));
    CHECK(p.naturals[i] <= s.level_ends[static_cast<std::size_t>(p.levels[i] - 1)]);
  }
  CHECK_THROWS_AS(draw_symmetric(dyadic_scheme(1, {4, 4, 5}, 2, true), 1), PreconditionError);

  // The positive half of level 4 (frequencies 9..16) is the same stream as a
  // plain multilevel draw over a level of size 8.
  LevelScheme half;
  half.level_ends = {1, 2, 3, 11};
  half.m_local = {1, 1, 1, 5};
  half.saturation = 3;
  const SamplingPattern q = draw_multilevel(half, 31);
  std::vector<long> positive;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.levels[i] == 4 && i % 2 == 0) positive.push_back(FourierIndexMap::frequency(p.naturals[i]));
  }
  std::vector<long> plain;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q.levels[i] == 4) plain.push_back(q.naturals[i] - 3 + 8);
  }
  CHECK(positive == plain);
}

TEST_CASE("scaling_weights") {
  const LevelScheme s = dyadic_scheme(5, {64, 16, 0}, 1, true);
  const std::vector<double> d = scaling_weights(s, 300);
  CHECK(d[0] == 1.0);
  CHECK(d[63] == 1.0);
  CHECK(d[64] == doctest::Approx(2.0));
  CHECK(d[127] == doctest::Approx(2.0));
  CHECK(d[128] == 0.0);
  CHECK(d[299] == 0.0);
}

TEST_CASE("E[A*A] equals the truncated Gram matrix (Monte-Carlo)") {
  const WaveletSpec haar = daubechies_wavelet(1);
  const CrossGramian U = cross_gramian(haar, 16, 16);
  const LevelScheme s = dyadic_scheme(0, {2, 1, 2, 4}, 1, true);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(16, 16);
  const int patterns = 2000;
  for (int t = 0; t < patterns; ++t) {
    const ComplexOperator A = subsampled_gramian_operator(U, draw_multilevel(s, mix_seed({99, static_cast<std::uint64_t>(t)})));
    const Eigen::MatrixXcd M = A.dense();
    acc += M.adjoint() * M;
  }
  acc /= patterns;
  const Eigen::MatrixXcd G = U.entries.adjoint() * U.entries;
  const double gap = Eigen::JacobiSVD<Eigen::MatrixXcd>(acc - G).singularValues()(0);
  CHECK(gap <= 0.05);
}

TEST_CASE("gaussian_operator") {
  const Eigen::MatrixXd G = gaussian_matrix(200, 300, 11);
  const double mean_norm = G.colwise().norm().mean();
  CHECK(mean_norm >= 0.9);
  CHECK(mean_norm <= 1.1);
  CHECK(G == gaussian_matrix(200, 300, 11));
  CHECK(G != gaussian_matrix(200, 300, 12));

  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(40, -1.0, 2.0);
  double acc = 0.0;
  for (int t = 0; t < 1000; ++t) acc += (gaussian_matrix(20, 40, mix_seed({5, static_cast<std::uint64_t>(t)})) * x).squaredNorm();
  CHECK(acc / 1000 == doctest::Approx(x.squaredNorm()).epsilon(0.05));

  const RealOperator A = gaussian_operator(30, 50, 3);
  CHECK(adjoint_gap(A, 1) <= 1e-10);
  CHECK(A.norm() == doctest::Approx(Eigen::JacobiSVD<Eigen::MatrixXd>(A.dense()).singularValues()(0)).epsilon(0.01));
}

TEST_CASE("two_level_operator") {
  const RealOperator A = two_level_operator(8, 64, 20, 4);
  CHECK(A.rows() == 28);
  CHECK(A.cols() == 64);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(64);
  d.head(8) = Eigen::VectorXd::LinSpaced(8, 1.0, 8.0);
  const Eigen::VectorXd y = A.apply(d);
  CHECK(y.head(8) == d.head(8));
  CHECK(y.tail(20).norm() == 0.0);
  CHECK(adjoint_gap(A, 2) <= 1e-10);
  const Eigen::MatrixXd M = A.dense();
  CHECK(M.bottomRightCorner(20, 56) == gaussian_matrix(20, 56, 4));
}

TEST_CASE("subsampled_gramian_operator") {
  const WaveletSpec haar = daubechies_wavelet(1);
  const CrossGramian U = cross_gramian(haar, 32, 32);

  SUBCASE("full saturation gives P_N U P_M") {
    const SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 4, 8, 16}, 5, true), 1);
    CHECK((subsampled_gramian_operator(U, p).dense() - U.entries).norm() == 0.0);
  }
  SUBCASE("duplicate rows") {
    SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 4, 8, 16}, 5, true), 1);
    p.naturals.push_back(7);
    p.levels.push_back(3);
    const Eigen::MatrixXcd A = subsampled_gramian_operator(U, p).dense();
    CHECK(A.row(32) == A.row(6));
  }
  SUBCASE("index out of range") {
    const SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 4, 8, 16, 8}, 5, true), 1);
    CHECK_THROWS(subsampled_gramian_operator(U, p));
  }
  SUBCASE("measurements of a function are its scaled Fourier coefficients") {
    // 1_[0,1/4) - 2 * 1_[1/2,5/8) lies in the Haar space at scale 3.
    const PiecewiseFunction f([](double x) { return (x < 0.25 ? 1.0 : 0.0) - (x >= 0.5 && x < 0.625 ? 2.0 : 0.0); },
                              {0.25, 0.5, 0.625}, 0.0);
    const CoefficientVector c = function_to_coefficients(f, haar, 5);
    Eigen::VectorXcd x(32);
    for (long i = 0; i < 32; ++i) x(i) = c.values[static_cast<std::size_t>(i)];
    const LevelScheme s = dyadic_scheme(0, {2, 2, 3, 5, 9}, 2, true);
    const SamplingPattern p = draw_multilevel(s, 17);
    const Eigen::VectorXcd y = subsampled_gramian_operator(U, p).apply(x);
    const std::vector<double> d = scaling_weights(s, 32);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const long n = p.naturals[i];
      const long w = FourierIndexMap::frequency(n);
      const cd expect = d[static_cast<std::size_t>(n - 1)] * fourier_coefficients(f, std::vector<long>{w})[0];
      CHECK(std::abs(y(static_cast<long>(i)) - expect) < 1e-10);
    }
  }
  SUBCASE("saturated rows equal rows of U") {
    const SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 2, 3, 5, 9}, 2, true), 3);
    const Eigen::MatrixXcd A = subsampled_gramian_operator(U, p).dense();
    for (long i = 0; i < 4; ++i) CHECK(A.row(i) == U.entries.row(i));
  }
}

TEST_CASE("fourier_operator agrees with the dense subsampled Gramian") {
  for (int p : {1, 2, 3}) {
    const WaveletSpec spec = daubechies_wavelet(p);
    const int j0 = spec.j0;
    const LevelScheme s = dyadic_scheme(j0, {1L << (j0 + 1), 1L << (j0 + 1), 3, 5, 9}, 2, true);
    const SamplingPattern pat = draw_multilevel(s, 8);
    const long N = s.level_ends.back();
    const long M = N / 2;
    const CrossGramian U = cross_gramian(spec, N, M);
    const ComplexOperator dense = subsampled_gramian_operator(U, pat);
    const ComplexOperator fast = fourier_operator(spec, M, pat);
    CHECK((fast.dense() - dense.dense()).norm() <= 1e-9 * dense.dense().norm());
    CHECK(adjoint_gap(fast, 5) <= 1e-10);
    const double svd = Eigen::JacobiSVD<Eigen::MatrixXcd>(dense.dense()).singularValues()(0);
    CHECK(fast.norm() == doctest::Approx(svd).epsilon(0.01));
    double dmax = 0.0;
    for (double v : scaling_weights(s, N)) dmax = std::max(dmax, v);
    const Eigen::MatrixXcd unique = subsampled_gramian_operator(U, deduplicate(pat)).dense();
    CHECK(Eigen::JacobiSVD<Eigen::MatrixXcd>(unique).singularValues()(0) <= dmax * (1.0 + 1e-9));
  }
}

TEST_CASE("pattern CSV and summary") {
  SamplingPattern p = draw_multilevel(dyadic_scheme(0, {2, 1}, 1, true), 4);
  p.naturals.push_back(p.naturals.back());
  p.levels.push_back(2);
  std::ostringstream out;
  write_pattern_csv(out, p);
  const std::string text = out.str();
  CHECK(text.rfind("level,signed_frequency,natural_index,multiplicity\n1,0,1,1\n1,1,2,1\n", 0) == 0);
  const long n = p.naturals.back();
  CHECK(text.find("2," + std::to_string(FourierIndexMap::frequency(n)) + "," + std::to_string(n) + ",2\n") !=
        std::string::npos);
  CHECK(pattern_summary(p) == "m_per_level=2;2 total=4 saturation=1 seed=4");
}
