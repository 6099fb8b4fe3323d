#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "wavecs/diagnostics.hpp"
#include "wavecs/errors.hpp"
#include "wavecs/gramian.hpp"
#include "wavecs/operators.hpp"
#include "wavecs/rng.hpp"
#include "wavecs/solvers.hpp"

using namespace wavecs;

namespace {

// Minimum of sum_{i not in S} w_i |x_i| over all supports with at most s_k entries per level.
double sigma_oracle(const Eigen::VectorXd& x, const LevelSparsity& plan, const Eigen::VectorXd& w) {
  const long n = x.size();
  double best = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << n); ++mask) {
    bool ok = true;
    for (int k = 1; k <= plan.levels() && ok; ++k) {
      long count = 0;
      for (long i = plan.level_begin(k); i < plan.level_ends[static_cast<std::size_t>(k - 1)]; ++i) count += (mask >> i) & 1L;
      ok = count <= plan.s_local[static_cast<std::size_t>(k - 1)];
    }
    if (!ok) continue;
    double rest = 0.0;
    for (long i = 0; i < n; ++i) {
      if (!((mask >> i) & 1L)) rest += w(i) * std::abs(x(i));
    }
    best = std::min(best, rest);
  }
  return best;
}

Eigen::MatrixXcd random_complex(long rows, long cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(2.0 * rows));
  Eigen::MatrixXcd out(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) out(i, j) = {nd(gen), nd(gen)};
  }
  return out;
}

double gaussian_bp_error(long m, long N, int s, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  std::vector<long> idx(static_cast<std::size_t>(N));
  std::iota(idx.begin(), idx.end(), 0L);
  for (int t = 0; t < s; ++t) {
    const long pick = t + static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(N - t)));
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
    x(idx[static_cast<std::size_t>(t)]) = rng.normal();
  }
  const RealOperator A = gaussian_operator(m, N, mix_seed({seed, 2}));
  const auto result = basis_pursuit(A, A.apply(x), SolveOptions{});
  return (result.x - x).norm() / x.norm();
}

}  // namespace

TEST_CASE("LevelSparsity") {
  const LevelSparsity plan{{2, 4, 8}, {1, 2, 3}};
  CHECK(plan.levels() == 3);
  CHECK(plan.total() == 8);
  CHECK(plan.level_begin(1) == 0);
  CHECK(plan.level_begin(3) == 4);
  CHECK_NOTHROW(plan.validate());
  CHECK_THROWS_AS((LevelSparsity{{2, 2}, {1, 1}}.validate()), ShapeError);
  CHECK_THROWS_AS((LevelSparsity{{2, 4}, {1}}.validate()), ShapeError);
  CHECK_THROWS_AS((LevelSparsity{{2, 4}, {3, 1}}.validate()), PreconditionError);
  CHECK_THROWS_AS((LevelSparsity{{}, {}}.validate()), ShapeError);
}

TEST_CASE("sigma_sM_weighted") {
  SUBCASE("full sparsity gives zero") {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -2.0, 3.0);
    CHECK(sigma_sM_weighted(x, LevelSparsity{{2, 6}, {2, 4}}, Eigen::VectorXd::Ones(6)) == 0.0);
  }
  SUBCASE("one level keeps the largest") {
    const Eigen::VectorXd x = Eigen::Vector3d(3.0, 1.0, 2.0);
    CHECK(sigma_sM_weighted(x, LevelSparsity{{3}, {1}}, Eigen::VectorXd::Ones(3)) == 3.0);
  }
  SUBCASE("weights decide what is kept") {
    const Eigen::VectorXd x = Eigen::Vector3d(3.0, 1.0, 2.0);
    const Eigen::VectorXd w = Eigen::Vector3d(1.0, 10.0, 1.0);
    CHECK(sigma_sM_weighted(x, LevelSparsity{{3}, {1}}, w) == doctest::Approx(5.0));
  }
  SUBCASE("ties keep the smaller index") {
    const Eigen::VectorXd x = Eigen::Vector3d(1.0, 1.0, 1.0);
    const Eigen::VectorXd w = Eigen::Vector3d(1.0, 2.0, 4.0);
    // w|x| = 1, 2, 4: keep index 2, the rest sums to 3
    CHECK(sigma_sM_weighted(x, LevelSparsity{{3}, {1}}, w) == 3.0);
    const Eigen::VectorXd xt = Eigen::Vector3d(2.0, 1.0, 0.5);
    const Eigen::VectorXd wt = Eigen::Vector3d(1.0, 2.0, 4.0);
    CHECK(sigma_sM_weighted(xt, LevelSparsity{{3}, {1}}, wt) == 4.0);
  }
  SUBCASE("complex magnitudes") {
    Eigen::VectorXcd x(3);
    x << std::complex<double>(3.0, 4.0), std::complex<double>(0.0, 1.0), std::complex<double>(-2.0, 0.0);
    CHECK(sigma_sM_weighted(x, LevelSparsity{{3}, {1}}, Eigen::VectorXd::Ones(3)) == doctest::Approx(3.0));
  }
  SUBCASE("one level, unit weights: l1 tail beyond the s largest") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x(10);
      for (long i = 0; i < 10; ++i) x(i) = nd(gen);
      std::vector<double> mags(10);
      for (long i = 0; i < 10; ++i) mags[static_cast<std::size_t>(i)] = std::abs(x(i));
      std::sort(mags.begin(), mags.end(), std::greater<>());
      const double tail = std::accumulate(mags.begin() + 4, mags.end(), 0.0);
      CHECK(sigma_sM_weighted(x, LevelSparsity{{10}, {4}}, Eigen::VectorXd::Ones(10)) == doctest::Approx(tail).epsilon(1e-13));
    }
  }
  SUBCASE("matches the exhaustive oracle for lengths <= 12") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.2, 3.0);
    const std::vector<LevelSparsity> plans = {
        {{12}, {5}}, {{2, 4, 8, 12}, {1, 2, 2, 1}}, {{3, 7, 10}, {0, 3, 2}}, {{1, 5, 9}, {1, 1, 4}}};
    for (const auto& plan : plans) {
      const long n = plan.total();
      for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(n);
        Eigen::VectorXd w(n);
        for (long i = 0; i < n; ++i) {
          x(i) = nd(gen);
          w(i) = ud(gen);
        }
        CHECK(sigma_sM_weighted(x, plan, w) == doctest::Approx(sigma_oracle(x, plan, w)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("positive scaling of the weights scales the result") {
    const Eigen::VectorXd x = (Eigen::VectorXd(8) << 0.3, -1.2, 0.7, 2.0, -0.1, 0.9, 0.05, -1.5).finished();
    const Eigen::VectorXd w = (Eigen::VectorXd(8) << 1.0, 0.5, 2.0, 1.0, 3.0, 1.5, 0.7, 1.1).finished();
    const LevelSparsity plan{{2, 4, 8}, {1, 1, 2}};
    const double base = sigma_sM_weighted(x, plan, w);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      CHECK(sigma_sM_weighted(x, plan, c * w) == doctest::Approx(c * base).epsilon(1e-13));
    }
  }
  SUBCASE("errors") {
    const LevelSparsity plan{{2, 4}, {1, 1}};
    CHECK_THROWS_AS(sigma_sM_weighted(Eigen::VectorXd(Eigen::VectorXd::Ones(5)), plan, Eigen::VectorXd(Eigen::VectorXd::Ones(5))), ShapeError);
    CHECK_THROWS_AS(sigma_sM_weighted(Eigen::VectorXd(Eigen::VectorXd::Ones(4)), plan, Eigen::VectorXd(Eigen::VectorXd::Ones(3))), ShapeError);
    CHECK_THROWS_AS(sigma_sM_weighted(Eigen::VectorXd(Eigen::VectorXd::Ones(4)), plan, Eigen::VectorXd(Eigen::VectorXd::Zero(4))), PreconditionError);
  }
}

TEST_CASE("rip_constant_bruteforce") {
  SUBCASE("orthonormal columns") {
    const Eigen::MatrixXcd Q = Eigen::HouseholderQR<Eigen::MatrixXcd>(random_complex(12, 8, 1)).householderQ() *
                               Eigen::MatrixXcd::Identity(12, 8);
    for (int s = 1; s <= 4; ++s) {
      const RipReport rep = rip_constant_bruteforce(Q, s);
      CHECK(rep.constant <= 1e-12);
      CHECK(rep.order == std::vector<long>{s});
    }
    CHECK(rip_constant_bruteforce(Q, 3).supports_checked == 56);
  }
  SUBCASE("duplicate columns give delta_2 = 1") {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(4, 5);
    A.col(4) = A.col(1);
    CHECK(rip_constant_bruteforce(A, 2).constant == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("scaled identity") {
    const Eigen::MatrixXcd A = 1.5 * Eigen::MatrixXcd::Identity(6, 6);
    CHECK(rip_constant_bruteforce(A, 3).constant == doctest::Approx(1.25));
  }
  SUBCASE("matches the dense Gram eigenvalues when s = columns") {
    const Eigen::MatrixXcd A = random_complex(10, 4, 5);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(A.adjoint() * A, Eigen::EigenvaluesOnly).eigenvalues();
    const double expected = std::max(std::abs(ev(0) - 1.0), std::abs(ev(3) - 1.0));
    CHECK(rip_constant_bruteforce(A, 4).constant == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("nondecreasing in s") {
    const Eigen::MatrixXcd A = random_complex(8, 12, 9);
    double prev = 0.0;
    for (int s = 1; s <= 4; ++s) {
      const double d = rip_constant_bruteforce(A, s).constant;
      CHECK(d >= prev - 1e-14);
      prev = d;
    }
  }
  SUBCASE("column permutation invariance") {
    const Eigen::MatrixXcd A = random_complex(7, 10, 21);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(10);
    perm.setIdentity();
    std::mt19937_64 gen(4);
    std::shuffle(perm.indices().data(), perm.indices().data() + 10, gen);
    const Eigen::MatrixXcd B = A * perm;
    for (int s = 1; s <= 3; ++s) CHECK(rip_constant_bruteforce(B, s).constant == doctest::Approx(rip_constant_bruteforce(A, s).constant).epsilon(1e-13));
  }
  SUBCASE("Gaussian 40 x 16: delta_2 decreases in m on average") {
    double prev = std::numeric_limits<double>::infinity();
    for (long m : {10L, 20L, 40L}) {
      double mean = 0.0;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        mean += rip_constant_bruteforce(gaussian_matrix(m, 16, mix_seed({seed, 99})).cast<std::complex<double>>(), 2).constant;
      }
      mean /= 10.0;
      CHECK(mean < prev);
      prev = mean;
    }
  }
  SUBCASE("caps") {
    CHECK_THROWS_AS(rip_constant_bruteforce(Eigen::MatrixXcd::Identity(17, 17), 2), CapError);
    CHECK_THROWS_AS(rip_constant_bruteforce(Eigen::MatrixXcd::Identity(8, 8), 5), CapError);
    CHECK_THROWS_AS(rip_constant_bruteforce(Eigen::MatrixXcd::Identity(8, 8), 0), CapError);
    CHECK_THROWS_AS(rip_constant_bruteforce(Eigen::MatrixXcd::Identity(3, 3), 4), CapError);
  }
}

TEST_CASE("gripl_constant_bruteforce") {
  SUBCASE("A = G gives zero") {
    const Eigen::MatrixXcd G = random_complex(8, 8, 2) + 2.0 * Eigen::MatrixXcd::Identity(8, 8);
    const RipReport rep = gripl_constant_bruteforce(G, G, LevelSparsity{{2, 4, 8}, {1, 2, 2}});
    CHECK(rep.constant <= 1e-10);
    CHECK(rep.supports_checked == 2 * 1 * 6);
    CHECK(rep.order == std::vector<long>{1, 2, 2});
  }
  SUBCASE("G = identity with one level equals plain RIP") {
    const Eigen::MatrixXcd A = random_complex(9, 12, 13);
    for (int s = 1; s <= 3; ++s) {
      const RipReport a = gripl_constant_bruteforce(A, Eigen::MatrixXcd::Identity(12, 12), LevelSparsity{{12}, {s}});
      const RipReport b = rip_constant_bruteforce(A, s);
      CHECK(a.constant == doctest::Approx(b.constant).epsilon(1e-12));
      CHECK(a.supports_checked == b.supports_checked);
    }
  }
  SUBCASE("G = identity in levels: max over level-feasible supports") {
    const Eigen::MatrixXcd A = random_complex(8, 8, 17);
    const LevelSparsity plan{{4, 8}, {1, 2}};
    double expected = 0.0;
    for (long a = 0; a < 4; ++a) {
      for (long b = 4; b < 8; ++b) {
        for (long c = b + 1; c < 8; ++c) {
          Eigen::MatrixXcd AS(8, 3);
          AS << A.col(a), A.col(b), A.col(c);
          const Eigen::VectorXd ev =
              Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(AS.adjoint() * AS, Eigen::EigenvaluesOnly).eigenvalues();
          expected = std::max({expected, std::abs(ev(0) - 1.0), std::abs(ev(2) - 1.0)});
        }
      }
    }
    CHECK(gripl_constant_bruteforce(A, Eigen::MatrixXcd::Identity(8, 8), plan).constant ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("subsampled Haar Gramian against a generalized eigensolve") {
    const CrossGramian U = cross_gramian(daubechies_wavelet(1), 16, 8);
    const Eigen::MatrixXcd G = gram_sqrt(U, 16, 8);
    const LevelSparsity full{{2, 4, 8}, {2, 2, 4}};
    // all rows: the Gram matrices agree
    CHECK(gripl_constant_bruteforce(U.entries, G, full).constant <= 1e-10);
    // the first 12 rows: one support, so the constant is the extreme generalized eigenvalue deviation
    const Eigen::MatrixXcd A = U.entries.topRows(12);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(A.adjoint() * A, G.adjoint() * G,
                                                                   Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = ges.eigenvalues();
    const double expected = std::max(std::abs(ev(0) - 1.0), std::abs(ev(7) - 1.0));
    const RipReport rep = gripl_constant_bruteforce(A, G, full);
    CHECK(rep.supports_checked == 1);
    CHECK(rep.constant == doctest::Approx(expected).epsilon(1e-10));
    CHECK(rep.constant > 0.0);
    CHECK(rep.constant < 1.0);
    // sparser plans see a subset of the directions
    CHECK(gripl_constant_bruteforce(A, G, LevelSparsity{{2, 4, 8}, {1, 1, 2}}).constant <= rep.constant + 1e-12);
  }
  SUBCASE("errors and caps") {
    const Eigen::MatrixXcd I8 = Eigen::MatrixXcd::Identity(8, 8);
    CHECK_THROWS_AS(gripl_constant_bruteforce(I8, I8, LevelSparsity{{4, 6}, {1, 1}}), ShapeError);
    CHECK_THROWS_AS(gripl_constant_bruteforce(I8, Eigen::MatrixXcd::Identity(6, 6), LevelSparsity{{4, 8}, {1, 1}}), ShapeError);
    const Eigen::MatrixXcd I17 = Eigen::MatrixXcd::Identity(17, 17);
    CHECK_THROWS_AS(gripl_constant_bruteforce(I17, I17, LevelSparsity{{17}, {2}}), CapError);
    const Eigen::MatrixXcd I16 = Eigen::MatrixXcd::Identity(16, 16);
    CHECK_NOTHROW(gripl_constant_bruteforce(I16, I16, LevelSparsity{{16}, {8}}));
  }
}

TEST_CASE("success_rate") {
  SUBCASE("infinite threshold") {
    CHECK(success_rate([](std::uint64_t) { return 1e300; }, 7, std::numeric_limits<double>::infinity(), 1) == 1.0);
  }
  SUBCASE("per-trial seeds come from the master seed") {
    std::vector<std::uint64_t> seen;
    const double rate = success_rate(
        [&](std::uint64_t seed) {
          seen.push_back(seed);
          return seen.size() % 2 == 0 ? 0.0 : 1.0;
        },
        4, 0.5, 42);
    CHECK(rate == 0.5);
    REQUIRE(seen.size() == 4);
    for (std::uint64_t t = 0; t < 4; ++t) CHECK(seen[t] == mix_seed({42, t}));
  }
  SUBCASE("strict threshold") {
    CHECK(success_rate([](std::uint64_t) { return 0.5; }, 3, 0.5, 0) == 0.0);
  }
  SUBCASE("trials must be positive") {
    CHECK_THROWS_AS(success_rate([](std::uint64_t) { return 0.0; }, 0, 1.0, 0), PreconditionError);
  }
  SUBCASE("Gaussian BP at m = 4 s ln(N/s) + 30") {
    const long N = 256;
    const int s = 5;
    const long m = static_cast<long>(std::ceil(4.0 * s * std::log(static_cast<double>(N) / s) + 30.0));
    const double rate = success_rate([&](std::uint64_t seed) { return gaussian_bp_error(m, N, s, seed); }, 40, 1e-4, 2024);
    CHECK(rate >= 0.9);
  }
  SUBCASE("nondecreasing in m, median over master seeds") {
    const long N = 128;
    const int s = 5;
    double prev = -1.0;
    for (long m : {16L, 28L, 40L, 56L}) {
      std::vector<double> rates;
      for (std::uint64_t master : {1ULL, 2ULL, 3ULL}) {
        rates.push_back(success_rate([&](std::uint64_t seed) { return gaussian_bp_error(m, N, s, seed); }, 20, 1e-4, master));
      }
      std::sort(rates.begin(), rates.end());
      CHECK(rates[1] >= prev);
      prev = rates[1];
    }
    CHECK(prev >= 0.9);
  }
}
