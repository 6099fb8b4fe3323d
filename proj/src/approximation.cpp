#include "wavecs/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wavecs/errors.hpp"

namespace wavecs {

double linear_error(std::span<const double> d, std::size_t s) {
  if (s > d.size()) throw PreconditionError("linear_error: s exceeds vector length");
  double acc = 0.0;
  for (std::size_t k = s; k < d.size(); ++k) acc += d[k] * d[k];
  return std::sqrt(acc);
}

std::vector<std::size_t> largest_entries(std::span<const double> d, std::size_t s) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  s = std::min(s, d.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(d[a]);
                      const double mb = std::abs(d[b]);
                      return ma > mb || (ma == mb && a < b);
                    });
  order.resize(s);
  return order;
}

double best_s_term_error(std::span<const double> d, std::size_t s) {
  if (s > d.size()) throw PreconditionError("best_s_term_error: s exceeds vector length");
  std::vector<char> kept(d.size(), 0);
  for (std::size_t idx : largest_entries(d, s)) kept[idx] = 1;
  double acc = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!kept[k]) acc += d[k] * d[k];
  }
  return std::sqrt(acc);
}

namespace {

bool interval_hits(double lo, double hi, std::span<const double> breakpoints) {
  for (double b : breakpoints) {
    // periodic copies b + t that could fall inside (lo, hi)
    const double t_min = std::ceil(lo - b);
    for (double t = t_min; b + t < hi; t += 1.0) {
      if (b + t > lo) return true;
    }
  }
  return false;
}

}  // namespace

bool wavelet_support_hits(int j, long n, int p, std::span<const double> breakpoints) {
  const double scale = std::ldexp(1.0, -j);
  return interval_hits((n - p + 1) * scale, (n + p) * scale, breakpoints);
}

DecayProfile decay_profile(const CoefficientVector& d, const PiecewiseFunction& f, const WaveletSpec& spec) {
  if (d.j0 != spec.j0) throw ShapeError("decay_profile: coefficient j0 does not match wavelet");
  const std::vector<double> bps = f.periodic_breakpoints();
  DecayProfile out;
  for (int j = d.j0; j < d.j0 + d.r; ++j) {
    const std::size_t begin = std::size_t{1} << j;
    double hit = 0.0;
    double miss = 0.0;
    std::size_t n_hit = 0;
    std::size_t n_miss = 0;
    for (long n = 0; n < (1L << j); ++n) {
      const double v = std::abs(d.values[begin + static_cast<std::size_t>(n)]);
      if (wavelet_support_hits(j, n, spec.p, bps)) {
        hit = std::max(hit, v);
        ++n_hit;
      } else {
        miss = std::max(miss, v);
        ++n_miss;
      }
    }
    out.scales.push_back(j);
    out.hit_max.push_back(hit);
    out.miss_max.push_back(miss);
    out.hit_count.push_back(n_hit);
    out.miss_count.push_back(n_miss);
  }
  return out;
}

}  // namespace wavecs
