#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "wavecs/approximation.hpp"
#include "wavecs/dwt.hpp"
#include "wavecs/errors.hpp"
#include "wavecs/function.hpp"
#include "wavecs/wavelet.hpp"

using namespace wavecs;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(gen);
  return v;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// int_a^c of -x sign(x - b): the K = 1 test function.
double f1_integral(double a, double c, double b) {
  auto prim = [](double x) { return 0.5 * x * x; };
  double out = 0.0;
  if (a < b) out += prim(std::min(c, b)) - prim(a);
  if (c > b) out -= prim(c) - prim(std::max(a, b));
  return out;
}

// log-log least-squares slope
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("daubechies_filter closed forms") {
  const auto h1 = daubechies_filter(1);
  REQUIRE(h1.size() == 2);
  CHECK(h1[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(h1[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));

  const double s3 = std::sqrt(3.0);
  const double d = 4 * std::sqrt(2.0);
  const double expected[] = {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
  const auto h2 = daubechies_filter(2);
  REQUIRE(h2.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(h2[i] - expected[i]) < 1e-14);
}

TEST_CASE("daubechies_filter invariants for p = 1..10") {
  for (int p = 1; p <= 10; ++p) {
    CAPTURE(p);
    const auto h = daubechies_filter(p);
    REQUIRE(h.size() == static_cast<std::size_t>(2 * p));
    double sum = 0.0;
    for (double v : h) sum += v;
    CHECK(std::abs(sum - std::sqrt(2.0)) < 1e-12);
    for (int l = 0; l < p; ++l) {
      double acc = 0.0;
      for (int k = 0; k + 2 * l < 2 * p; ++k) acc += h[k] * h[k + 2 * l];
      CHECK(std::abs(acc - (l == 0 ? 1.0 : 0.0)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(daubechies_filter(0), UnsupportedError);
  CHECK_THROWS_AS(daubechies_filter(11), UnsupportedError);
}

TEST_CASE("coarsest_scale") {
  CHECK(coarsest_scale(1) == 0);
  CHECK(coarsest_scale(2) == 2);
  CHECK(coarsest_scale(3) == 3);
  CHECK(coarsest_scale(4) == 3);
  CHECK(coarsest_scale(5) == 4);
  CHECK(daubechies_wavelet(4).j0 == 3);
}

TEST_CASE("periodized_dwt of a constant (Haar)") {
  const WaveletSpec haar = daubechies_wavelet(1);
  std::vector<double> x(64, 2.5);
  const auto d = periodized_dwt(x, haar);
  REQUIRE(d.size() == 64);
  // A constant sampled as scale-6 scaling coefficients c gives c * 2^{3} at scale 0.
  CHECK(d.values[0] == doctest::Approx(2.5 * 8.0));
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(std::abs(d.values[i]) < 1e-12);
}

TEST_CASE("round trip and Parseval for p = 1..4, lengths up to 2^14") {
  for (int p = 1; p <= 4; ++p) {
    const WaveletSpec spec = daubechies_wavelet(p);
    for (int J = spec.j0; J <= 14; J += (J < 6 ? 1 : 4)) {
      CAPTURE(p);
      CAPTURE(J);
      const auto x = random_vector(std::size_t{1} << J, 17 + p + J);
      const auto d = periodized_dwt(x, spec);
      CHECK(std::abs(norm2(d.values) - norm2(x)) <= 1e-10 * norm2(x));
      const auto back = periodized_idwt(d, spec);
      double inf = 0.0, err = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        inf = std::max(inf, std::abs(x[i]));
        err = std::max(err, std::abs(back[i] - x[i]));
      }
      CHECK(err <= 1e-10 * inf);
    }
  }
}

TEST_CASE("db2 round trip on a random 2^8 vector") {
  const auto x = random_vector(256, 5);
  const auto back = periodized_idwt(periodized_dwt(x, daubechies_wavelet(2)), daubechies_wavelet(2));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-10);
}

TEST_CASE("scale and shape errors") {
  const WaveletSpec db2 = daubechies_wavelet(2);
  std::vector<double> tiny(2, 1.0);
  CHECK_THROWS_AS(periodized_dwt(tiny, db2), ShapeError);
  CoefficientVector bad;
  bad.values.assign(12, 0.0);
  bad.j0 = 2;
  CHECK_THROWS_AS(periodized_idwt(bad, db2), ShapeError);
}

TEST_CASE("vanishing moments annihilate polynomials of degree < p at interior positions") {
  for (int p = 1; p <= 4; ++p) {
    const WaveletSpec spec = daubechies_wavelet(p);
    const int J = 10;
    for (int deg = 0; deg < p; ++deg) {
      std::vector<double> x(std::size_t{1} << J);
      for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::pow(static_cast<double>(n) / x.size(), deg) + 0.5;
      const auto d = periodized_dwt(x, spec);
      double worst = 0.0;
      for (int j = spec.j0; j < J; ++j) {
        const long size = 1L << j;
        for (long n = 2 * p; n < size - 2 * p; ++n) worst = std::max(worst, std::abs(d.values[size + n]));
      }
      CAPTURE(p);
      CAPTURE(deg);
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("function_to_coefficients on simple functions") {
  const WaveletSpec haar = daubechies_wavelet(1);
  const PiecewiseFunction one([](double) { return 1.0; }, {}, 1.0);
  const auto d1 = function_to_coefficients(one, haar, 3);
  CHECK(d1.values[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < d1.size(); ++i) CHECK(std::abs(d1.values[i]) < 1e-13);

  const PiecewiseFunction sgn([](double x) { return x >= 0.5 ? 1.0 : -1.0; }, {0.5}, 1.0);
  const auto d2 = function_to_coefficients(sgn, haar, 3);
  CHECK(std::abs(d2.values[0]) < 1e-13);
  CHECK(d2.values[1] == doctest::Approx(-1.0));
  for (std::size_t i = 2; i < d2.size(); ++i) CHECK(std::abs(d2.values[i]) < 1e-13);
}

TEST_CASE("function_to_coefficients vs exact Haar integrals of f_1") {
  const PiecewiseFunction f = make_fk(1);
  const double b = f.breakpoints().at(0);
  const WaveletSpec haar = daubechies_wavelet(1);
  const int J = 12;
  const auto d = function_to_coefficients(f, haar, J);
  double worst_far = 0.0, worst_near = 0.0;
  worst_near = std::abs(d.values[0] - f1_integral(0, 1, b));
  for (int j = 0; j < J; ++j) {
    const double h = std::ldexp(1.0, -j);
    for (long k = 0; k < (1L << j); ++k) {
      const double exact = std::sqrt(std::ldexp(1.0, j)) *
                           (f1_integral(k * h, (k + 0.5) * h, b) - f1_integral((k + 0.5) * h, (k + 1) * h, b));
      const double err = std::abs(d.values[(1L << j) + k] - exact);
      const bool near = b > k * h && b < (k + 1) * h;
      (near ? worst_near : worst_far) = std::max(near ? worst_near : worst_far, err);
    }
  }
  CHECK(worst_far < 1e-10);
  // The jump cell of the fine grid is resolved only to its sub-cell width.
  CHECK(worst_near < 5e-3);
}

TEST_CASE("function_to_coefficients: db2 scaling coefficients of f_1 match the moment oracle") {
  // On a linear piece, <f, phi_{J,k}> = 2^{-J/2} f(2^{-J}(k + c)) with c the centroid of phi.
  const PiecewiseFunction f = make_fk(1);
  const WaveletSpec db2 = daubechies_wavelet(2);
  const int J = 12;
  const auto d = function_to_coefficients(f, db2, J);
  const auto s = periodized_idwt(d, db2);
  const double c = db2.scaling_centroid();
  const double b = f.breakpoints().at(0);
  const double L = std::ldexp(1.0, J);
  double worst = 0.0;
  long checked = 0;
  for (long k = 0; k < static_cast<long>(L); ++k) {
    const double lo = k / L, hi = (k + 2 * db2.p - 1) / L;
    if ((b > lo && b < hi) || hi > 1.0) continue;  // support meets a jump of the periodic extension
    worst = std::max(worst, std::abs(s[k] - f((k + c) / L) / std::sqrt(L)));
    ++checked;
  }
  CHECK(checked > 4000);
  CHECK(worst < 1e-6);
}

TEST_CASE("linear and best s-term errors") {
  const std::vector<double> d{3, 2, 1};
  CHECK(linear_error(d, 2) == doctest::Approx(1.0));
  CHECK(linear_error(d, 3) == 0.0);
  const std::vector<double> e{1, 5, 2};
  CHECK(best_s_term_error(e, 1) == doctest::Approx(std::sqrt(5.0)));
  CHECK_THROWS_AS(linear_error(d, 4), PreconditionError);

  const std::vector<double> ties{2, -2, 1};
  CHECK(largest_entries(ties, 1) == std::vector<std::size_t>{0});
}

TEST_CASE("best s-term error equals brute force over subsets") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    auto x = random_vector(10 + seed % 3, seed);
    if (seed % 4 == 0) x[3] = x[5];  // ties
    for (std::size_t s = 0; s <= 4; ++s) {
      double best = INFINITY;
      const std::size_t n = x.size();
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != s) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!(mask >> i & 1u)) acc += x[i] * x[i];
        }
        best = std::min(best, std::sqrt(acc));
      }
      CHECK(best_s_term_error(x, s) == best);
    }
  }
}

TEST_CASE("error monotonicity and ordering on f_1") {
  const auto d = function_to_coefficients(make_fk(1), daubechies_wavelet(1), 10);
  double prev_lin = INFINITY, prev_best = INFINITY;
  for (std::size_t s = 1; s <= d.size(); s *= 2) {
    const double lin = linear_error(d.values, s);
    const double best = best_s_term_error(d.values, s);
    CHECK(best <= lin + 1e-15);
    CHECK(lin <= prev_lin);
    CHECK(best <= prev_best);
    prev_lin = lin;
    prev_best = best;
  }
}

TEST_CASE("linear error of f_1 (Haar) decays like s^{-1/2}") {
  const auto d = function_to_coefficients(make_fk(1), daubechies_wavelet(1), 14);
  std::vector<double> s, e;
  for (std::size_t n = 16; n <= 2048; n *= 2) {
    s.push_back(static_cast<double>(n));
    e.push_back(linear_error(d.values, n));
  }
  const double k = slope(s, e);
  CHECK(k < -0.4);
  CHECK(k > -0.6);
}

TEST_CASE("best s-term error of f_1 (db2) decays at least like s^{-1.7}") {
  const auto d = function_to_coefficients(make_fk(1), daubechies_wavelet(2), 12);
  std::vector<double> s, e;
  for (std::size_t n = 16; n <= 512; n *= 2) {
    s.push_back(static_cast<double>(n));
    e.push_back(best_s_term_error(d.values, n));
  }
  CHECK(slope(s, e) <= -1.7);
}

TEST_CASE("decay_profile") {
  const WaveletSpec haar = daubechies_wavelet(1);
  const PiecewiseFunction smooth([](double x) { return std::sin(2 * std::numbers::pi * x); }, {}, 1.0);
  const auto ps = decay_profile(function_to_coefficients(smooth, haar, 10), smooth, haar);
  for (std::size_t c : ps.hit_count) CHECK(c == 0);

  const PiecewiseFunction f = make_fk(1);
  const auto p = decay_profile(function_to_coefficients(f, haar, 14), f, haar);
  // Smooth (linear) pieces: 2^{-3/2} per scale; jump cells: 2^{-1/2} per scale.
  double log_miss = 0.0, log_hit = 0.0;
  int n = 0;
  for (std::size_t i = 4; i + 1 < p.scales.size(); ++i) {
    log_miss += std::log(p.miss_max[i + 1] / p.miss_max[i]);
    log_hit += std::log(p.hit_max[i + 1] / p.hit_max[i]);
    ++n;
  }
  const double miss_ratio = std::exp(log_miss / n);
  const double hit_ratio = std::exp(log_hit / n);
  CHECK(miss_ratio == doctest::Approx(std::pow(2.0, -1.5)).epsilon(0.3));
  CHECK(hit_ratio == doctest::Approx(std::pow(2.0, -0.5)).epsilon(0.3));
}

TEST_CASE("make_fk breakpoints") {
  const auto f1 = make_fk(1);
  REQUIRE(f1.breakpoints().size() == 1);
  CHECK(f1.breakpoints()[0] == doctest::Approx(std::pow(1.3, -8)).epsilon(1e-14));
  CHECK(f1.breakpoints()[0] == doctest::Approx(0.12259).epsilon(1e-4));
  CHECK(f1.piece_count() == 2);
  const auto f8 = make_fk(8);
  REQUIRE(f8.breakpoints().size() == 8);
  CHECK(f8.breakpoints().back() == doctest::Approx(0.7692).epsilon(1e-4));
  CHECK(make_fk(10).breakpoints().size() == 8);
  const auto custom = make_fk(3, std::vector<double>{0.2, 0.5, 0.9});
  CHECK(custom.breakpoints().size() == 3);
}
