#include "wavecs/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "wavecs/errors.hpp"

namespace wavecs {
namespace {

constexpr int kNodesPerPanel = 32;
// Panels never span more than this many periods of the integrand's oscillation.
constexpr double kCyclesPerPanel = 4.0;

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Quadrature panels covering [0,1], split at breakpoints, each short enough
// for the highest frequency.
std::vector<std::pair<double, double>> make_panels(const std::vector<double>& breakpoints, double max_freq) {
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
  edges.push_back(1.0);
  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    const auto count = static_cast<long>(std::ceil((b - a) * (std::abs(max_freq) / kCyclesPerPanel + 1.0)));
    for (long c = 0; c < count; ++c) {
      panels.emplace_back(a + (b - a) * c / count, a + (b - a) * (c + 1) / count);
    }
  }
  return panels;
}

struct QuadratureGrid {
  std::vector<double> x;
  std::vector<double> wf;  // weight * f(x)
};

QuadratureGrid make_grid(const PiecewiseFunction& f, double max_freq) {
  const GaussLegendre& rule = gauss_legendre(kNodesPerPanel);
  QuadratureGrid grid;
  for (const auto& [a, b] : make_panels(f.breakpoints(), max_freq)) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < kNodesPerPanel; ++i) {
      const double x = mid + half * rule.nodes[static_cast<std::size_t>(i)];
      grid.x.push_back(x);
      grid.wf.push_back(half * rule.weights[static_cast<std::size_t>(i)] * f(x));
    }
  }
  return grid;
}

std::complex<double> integrate(const QuadratureGrid& grid, long freq) {
  const double omega = -2.0 * std::numbers::pi * static_cast<double>(freq);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const double phase = omega * grid.x[i];
    re += grid.wf[i] * std::cos(phase);
    im += grid.wf[i] * std::sin(phase);
  }
  return {re, im};
}

}  // namespace

long FourierIndexMap::frequency(long natural) {
  if (natural < 1) throw PreconditionError("FourierIndexMap: natural index must be >= 1");
  return natural % 2 == 0 ? natural / 2 : -(natural - 1) / 2;
}

long FourierIndexMap::natural(long frequency) { return frequency > 0 ? 2 * frequency : 1 - 2 * frequency; }

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

std::vector<std::complex<double>> fourier_coefficients(const PiecewiseFunction& f,
                                                       std::span<const long> frequencies) {
  long max_freq = 0;
  for (long w : frequencies) max_freq = std::max(max_freq, std::abs(w));
  const QuadratureGrid grid = make_grid(f, static_cast<double>(max_freq));
  std::vector<std::complex<double>> out;
  out.reserve(frequencies.size());
  for (long w : frequencies) out.push_back(integrate(grid, w));
  return out;
}

FourierSampleTable::FourierSampleTable(const PiecewiseFunction& f, long N) {
  if (N < 1) throw PreconditionError("FourierSampleTable: N must be >= 1");
  std::vector<long> freqs(static_cast<std::size_t>(N));
  for (long i = 1; i <= N; ++i) freqs[static_cast<std::size_t>(i - 1)] = FourierIndexMap::frequency(i);
  values_ = fourier_coefficients(f, freqs);
}

std::complex<double> FourierSampleTable::at_natural(long natural) const {
  if (natural < 1 || natural > size()) throw PreconditionError("FourierSampleTable: index out of range");
  return values_[static_cast<std::size_t>(natural - 1)];
}

}  // namespace wavecs
