#include "wavecs/recipes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "wavecs/errors.hpp"

namespace wavecs {
namespace {

constexpr int kMaxScale = 62;

int checked_order(double alpha, int p) {
  if (!(alpha > 0.0)) throw PreconditionError("recipe: alpha must be positive");
  const int order = p > 0 ? p : static_cast<int>(std::ceil(alpha));
  if (order < 1 || order > 10) throw UnsupportedError("recipe: wavelet order must be in 1..10");
  return order;
}

int dim_scale(long dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<unsigned long>(dim))) {
    throw PreconditionError("recipe: dimension must be a positive power of two");
  }
  return std::countr_zero(static_cast<unsigned long>(dim));
}

// floor(log2(m^{2a+1} / ln(m)^{2a+2})), evaluated in the log domain.
int gauss_scale(long m, double alpha) {
  if (m < 3) throw BudgetError("recipe: need m >= 3");
  const double lm = std::log(static_cast<double>(m));
  return static_cast<int>(std::floor((2 * alpha + 1) * std::log2(static_cast<double>(m)) - (2 * alpha + 2) * std::log2(lm)));
}

long level_size(int j0, int k) { return k == 1 ? (1L << (j0 + 1)) : (1L << (j0 + k - 1)); }

}  // namespace

std::string to_string(RecipeMode mode) { return mode == RecipeMode::Theory ? "theory" : "experiment"; }

RecipeMode parse_recipe_mode(const std::string& text) {
  if (text == "theory") return RecipeMode::Theory;
  if (text == "experiment") return RecipeMode::Experiment;
  throw PreconditionError("unknown mode '" + text + "' (expected theory|experiment)");
}

GaussRecipe gauss_params(long m, double alpha, RecipeMode mode, long dim, int p) {
  GaussRecipe g;
  g.m = m;
  g.alpha = alpha;
  g.p = checked_order(alpha, p);
  g.j0 = coarsest_scale(g.p);
  g.mode = mode;
  if (mode == RecipeMode::Experiment) {
    const int J = dim_scale(dim);
    if (J < g.j0 + 1) throw BudgetError("gauss recipe: dimension below 2^{j0+1}");
    g.r = J - g.j0;
    g.N = dim;
    if (m < 1 || m > dim) throw BudgetError("gauss recipe: need 1 <= m <= dim");
    return g;
  }
  g.r = gauss_scale(m, alpha) - g.j0;
  if (g.r < 1) throw BudgetError("gauss recipe: m = " + std::to_string(m) + " gives r < 1");
  if (dim > 0 && (g.j0 + g.r > kMaxScale || (1L << (g.j0 + g.r)) > dim)) {
    g.r = dim_scale(dim) - g.j0;
    g.capped = true;
    if (g.r < 1) throw BudgetError("gauss recipe: dimension below 2^{j0+1}");
  }
  if (g.j0 + g.r > kMaxScale) throw CapError("gauss recipe: N = 2^" + std::to_string(g.j0 + g.r) + " is not representable");
  g.N = 1L << (g.j0 + g.r);
  return g;
}

OptimalRecipe optimal_params(long m, double alpha, RecipeMode mode, long dim, int p) {
  OptimalRecipe o;
  o.m = m;
  o.alpha = alpha;
  o.p = checked_order(alpha, p);
  o.j0 = coarsest_scale(o.p);
  o.mode = mode;
  if (m < (1L << (o.j0 + 2))) throw BudgetError("optimal recipe: need m >= 2^{j0+2}");
  o.r_bar = static_cast<int>(std::floor(std::log2(static_cast<double>(m) / 2.0))) - o.j0;
  if (mode == RecipeMode::Experiment) {
    const int J = dim_scale(dim);
    o.r = J - o.j0;
    o.N2 = dim;
    o.m1 = std::lround(static_cast<double>(m) / 2.0);
    o.N1 = o.m1;
    o.m2 = m - o.m1;
    if (o.m1 >= o.N2 || m > dim) throw BudgetError("optimal recipe: need m <= dim and m1 < N2");
    return o;
  }
  const GaussRecipe g = gauss_params(m, alpha, RecipeMode::Theory, dim, o.p);
  o.r = g.r;
  o.N2 = g.N;
  o.capped = g.capped;
  if (o.r_bar < 1 || o.r_bar >= o.r) {
    throw BudgetError("optimal recipe: need 0 < r_bar < r (r_bar = " + std::to_string(o.r_bar) +
                      ", r = " + std::to_string(o.r) + ")");
  }
  o.N1 = 1L << (o.j0 + o.r_bar);
  o.m1 = o.N1;
  o.m2 = m - o.m1;
  return o;
}

long FourierRecipe::total_measurements() const {
  long t = 0;
  for (long v : m_local) t += v;
  return t;
}

LevelScheme FourierRecipe::scheme() const {
  return dyadic_scheme(j0, m_local, r_tilde, mode == RecipeMode::Theory);
}

Eigen::VectorXd FourierRecipe::weights() const {
  if (j0 + r > 30) throw CapError("fourier recipe: weight vector too long to materialize");
  Eigen::VectorXd w(M);
  for (int k = 1; k <= r; ++k) {
    const long lo = k == 1 ? 0 : (1L << (j0 + k - 1));
    const long hi = 1L << (j0 + k);
    w.segment(lo, hi - lo).setConstant(level_weights[static_cast<std::size_t>(k - 1)]);
  }
  return w;
}

FourierRecipe fourier_params(long m, double alpha, const WaveletSpec& spec, double delta, RecipeMode mode, long dim) {
  if (!(alpha > 0.5)) throw PreconditionError("fourier recipe: need alpha > 1/2");
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("fourier recipe: need 0 < delta < 1");
  if (m < 4) throw BudgetError("fourier recipe: need m >= 4");
  FourierRecipe f;
  f.m = m;
  f.alpha = alpha;
  f.p = spec.p;
  f.q = spec.q;
  f.delta = delta;
  f.j0 = spec.j0;
  f.mode = mode;
  const double md = static_cast<double>(m);

  if (mode == RecipeMode::Experiment || dim > 0) {
    f.r = dim_scale(dim) - f.j0;
  } else {
    f.r = static_cast<int>(std::floor(std::max(2 * alpha + 1, alpha / (alpha - 0.5)) * std::log2(md))) - f.j0;
  }
  if (f.j0 + f.r > kMaxScale) throw CapError("fourier recipe: M = 2^" + std::to_string(f.j0 + f.r) + " is not representable");
  if (f.r < 2) throw BudgetError("fourier recipe: need r >= 2");
  f.M = 1L << (f.j0 + f.r);

  if (mode == RecipeMode::Experiment) {
    if (m > dim) throw BudgetError("fourier recipe: m exceeds the dimension");
    f.r_tilde = static_cast<int>(std::lround(std::log2(md / 2.0))) - f.j0;
  } else {
    f.r_tilde = static_cast<int>(std::floor(std::log2(md / 2.0))) - f.j0;
  }
  if (f.r_tilde < 1) throw BudgetError("fourier recipe: m = " + std::to_string(m) + " gives saturation r~ < 1");
  if (f.r_tilde >= f.r) throw BudgetError("fourier recipe: saturation r~ must stay below r");

  f.m_local.assign(static_cast<std::size_t>(f.r), 0);
  for (int k = 1; k <= f.r_tilde; ++k) f.m_local[static_cast<std::size_t>(k - 1)] = level_size(f.j0, k);
  if (mode == RecipeMode::Experiment) {
    long used = 0;
    for (int k = 1; k < f.r; ++k) {
      if (k > f.r_tilde) f.m_local[static_cast<std::size_t>(k - 1)] = 2 * (m / (4L * (f.r - f.r_tilde)));
      used += f.m_local[static_cast<std::size_t>(k - 1)];
    }
    f.m_local.back() = m - used;
    for (int k = f.r_tilde + 1; k <= f.r; ++k) {
      const long mk = f.m_local[static_cast<std::size_t>(k - 1)];
      if (mk < 0 || mk > level_size(f.j0, k)) {
        throw BudgetError("fourier recipe: m_" + std::to_string(k) + " = " + std::to_string(mk) +
                          " does not fit its level");
      }
    }
    if (f.total_measurements() != m) throw BudgetError("fourier recipe: experiment budget not exhausted exactly");
  } else {
    const double q = f.q;
    for (int k = f.r_tilde + 1; k <= f.r; ++k) {
      const double first = std::exp((2 * q + 2) * std::log(md) - (2 * q + 1) * (k + f.j0 + 2) * std::log(2.0));
      const double mk = std::floor(0.25 * (first + md / (4.0 * (f.r - f.r_tilde))));
      if (mk >= static_cast<double>(level_size(f.j0, k))) {
        throw BudgetError("fourier recipe: m_" + std::to_string(k) + " reaches its level size");
      }
      f.m_local[static_cast<std::size_t>(k - 1)] = static_cast<long>(mk);
    }
    if (f.total_measurements() > m) throw BudgetError("fourier recipe: local counts exceed the budget m");
  }

  f.L_bar = std::pow(std::log(md), 6.0 + delta);
  const double L_root = std::pow(f.L_bar, 1.0 / (2.0 * (f.q + 1.0)));
  f.r_bar = static_cast<int>(std::floor(std::log2(md / L_root))) - f.j0;
  const double upper = std::sqrt(std::pow(f.L_bar, (2 * f.q + 1) / (2 * f.q + 2)) * f.r);
  for (int k = 1; k <= f.r; ++k) {
    f.level_weights.push_back(k <= f.r_bar ? std::sqrt(md / (std::ldexp(1.0, k) * L_root)) : upper);
  }
  f.lambda = 1.0 / std::sqrt(static_cast<double>(f.r) * md);
  return f;
}

SparsityPlan sparsity_plan(const FourierRecipe& recipe) {
  SparsityPlan plan;
  const double denom = recipe.L_bar * recipe.r;
  plan.s_star = static_cast<long>(std::floor(static_cast<double>(recipe.m) / denom));
  if (plan.s_star < 1) {
    throw BudgetError("sparsity plan: s_* = floor(m / (L_bar r)) < 1 (m = " + std::to_string(recipe.m) +
                      ", L_bar r = " + std::to_string(denom) + ")");
  }
  for (int k = 1; k <= recipe.r; ++k) {
    const long size = level_size(recipe.j0, k);
    plan.s_local.push_back(k <= recipe.r_bar ? size : std::min(plan.s_star, size));
  }
  for (long s : plan.s_local) plan.s_total += s;
  for (int k = 1; k <= recipe.r; ++k) {
    const double sk = static_cast<double>(plan.s_local[static_cast<std::size_t>(k - 1)]);
    plan.weight_ratios.push_back(std::sqrt(static_cast<double>(plan.s_total) / sk) /
                                 recipe.level_weights[static_cast<std::size_t>(k - 1)]);
  }
  return plan;
}

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

}  // namespace

std::string describe(const GaussRecipe& g) {
  std::ostringstream s;
  s << "strategy=gauss\nmode=" << to_string(g.mode) << "\nm=" << g.m << "\nalpha=" << g.alpha << "\np=" << g.p
    << "\nj0=" << g.j0 << "\nr=" << g.r << "\nN=" << g.N << "\ncapped=" << (g.capped ? 1 : 0) << '\n';
  return s.str();
}

std::string describe(const OptimalRecipe& o) {
  std::ostringstream s;
  s << "strategy=optimal\nmode=" << to_string(o.mode) << "\nm=" << o.m << "\nalpha=" << o.alpha << "\np=" << o.p
    << "\nj0=" << o.j0 << "\nr=" << o.r << "\nr_bar=" << o.r_bar << "\nN1=" << o.N1 << "\nN2=" << o.N2
    << "\nm1=" << o.m1 << "\nm2=" << o.m2 << "\ncapped=" << (o.capped ? 1 : 0) << '\n';
  return s.str();
}

std::string describe(const FourierRecipe& f) {
  std::ostringstream s;
  s.precision(10);
  s << "strategy=fourier\nmode=" << to_string(f.mode) << "\nm=" << f.m << "\nalpha=" << f.alpha << "\np=" << f.p
    << "\nq=" << f.q << "\ndelta=" << f.delta << "\nj0=" << f.j0 << "\nr=" << f.r << "\nr_tilde=" << f.r_tilde
    << "\nr_bar=" << f.r_bar << "\nL_bar=" << f.L_bar << "\nM=" << f.M << "\nm_local=" << join(f.m_local)
    << "\nm_total=" << f.total_measurements() << "\nlevel_weights=" << join(f.level_weights)
    << "\nlambda=" << f.lambda << '\n';
  return s.str();
}

}  // namespace wavecs
