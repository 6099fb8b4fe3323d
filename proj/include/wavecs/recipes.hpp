#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wavecs/sampling.hpp"
#include "wavecs/wavelet.hpp"

namespace wavecs {

/// Theory: formulas as stated. Experiment: fixed dimension, saturation
/// round(log2(m/2)) and an exactly exhausted budget.
enum class RecipeMode { Theory, Experiment };

std::string to_string(RecipeMode mode);
RecipeMode parse_recipe_mode(const std::string& text);

struct GaussRecipe {
  long m = 0;
  double alpha = 0.0;
  int p = 1;
  int j0 = 0;
  int r = 0;
  long N = 0;
  bool capped = false;  // recipe N exceeded the dimension limit
  RecipeMode mode = RecipeMode::Theory;
};

struct OptimalRecipe {
  long m = 0;
  double alpha = 0.0;
  int p = 1;
  int j0 = 0;
  int r = 0;
  int r_bar = 0;
  long N1 = 0;
  long N2 = 0;
  long m1 = 0;
  long m2 = 0;
  bool capped = false;
  RecipeMode mode = RecipeMode::Theory;
};

struct FourierRecipe {
  long m = 0;
  double alpha = 0.0;
  int p = 1;
  double q = 0.0;
  double delta = 0.0;
  int j0 = 0;
  int r = 0;
  int r_tilde = 0;
  int r_bar = 0;  // may be <= 0 for small m: then every level uses the second weight plateau
  double L_bar = 0.0;
  std::vector<long> m_local;
  std::vector<double> level_weights;  // w^{(k)}, k = 1..r
  double lambda = 0.0;
  long M = 0;
  RecipeMode mode = RecipeMode::Theory;

  [[nodiscard]] long total_measurements() const;
  /// Dyadic sampling scheme N_k = 2^{j0+k} with the local counts.
  [[nodiscard]] LevelScheme scheme() const;
  /// Per-coordinate weights over the M wavelet coefficients.
  [[nodiscard]] Eigen::VectorXd weights() const;
};

struct SparsityPlan {
  std::vector<long> s_local;
  long s_star = 0;
  long s_total = 0;
  /// sqrt(s / s_k) / w^{(k)} per level.
  std::vector<double> weight_ratios;
};

/// p = ceil(alpha) unless given; r = floor(log2(m^{2a+1} / ln(m)^{2a+2})) - j0.
/// In experiment mode N = dim. In theory mode N is capped at dim when dim > 0.
GaussRecipe gauss_params(long m, double alpha, RecipeMode mode = RecipeMode::Theory, long dim = 0, int p = 0);

/// r as for Gauss, r_bar = floor(log2(m/2)) - j0, m1 = N1 = 2^{j0+r_bar}.
/// Experiment mode: m1 = N1 = round(m/2) and N2 = dim.
OptimalRecipe optimal_params(long m, double alpha, RecipeMode mode = RecipeMode::Theory, long dim = 0, int p = 0);

/// Fourier multilevel recipe for the given wavelet (q taken from it). With
/// dim > 0, r = log2(dim) - j0 (fixed-dimension variant; required in
/// experiment mode).
FourierRecipe fourier_params(long m, double alpha, const WaveletSpec& spec, double delta, RecipeMode mode,
                             long dim = 0);

/// s_k = level size for k <= r_bar, s_* = floor(m / (L_bar r)) above.
SparsityPlan sparsity_plan(const FourierRecipe& recipe);

/// key=value lines for reports.
std::string describe(const GaussRecipe& recipe);
std::string describe(const OptimalRecipe& recipe);
std::string describe(const FourierRecipe& recipe);

}  // namespace wavecs
