#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "wavecs/errors.hpp"
#include "wavecs/sweep.hpp"

namespace wavecs {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string render_plot(const std::vector<ResultRow>& rows) {
  std::set<std::string> methods;
  for (const auto& r : rows) methods.insert(r.method);
  std::vector<std::pair<std::string, std::map<long, double>>> series;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& method : methods) {
    std::map<long, double> med;
    for (const auto& [m, e] : median_errors(rows, method)) {
      if (m <= 0 || !(e > 0.0)) continue;
      med[m] = e;
      xmin = std::min(xmin, std::log10(static_cast<double>(m)));
      xmax = std::max(xmax, std::log10(static_cast<double>(m)));
      ymin = std::min(ymin, std::log10(e));
      ymax = std::max(ymax, std::log10(e));
    }
    if (!med.empty()) series.emplace_back(method, std::move(med));
  }
  if (series.empty()) throw PreconditionError("emit_plot: no finite positive data");
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double xpad = 0.1 * (xmax - xmin);
  const double ypad = 0.1 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto X = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  s << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
    for (int d = 1; d < 10; ++d) {
      const double lx = e + std::log10(static_cast<double>(d));
      if (lx < xmin || lx > xmax) continue;
      s << "<line x1=\"" << num(X(lx)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(X(lx)) << "\" y2=\""
        << num(kTop + ph + (d == 1 ? 6 : 3)) << "\" stroke=\"black\"/>\n";
    }
  }
  for (double base = std::pow(2.0, std::ceil(xmin / std::log10(2.0))); std::log10(base) <= xmax; base *= 2.0) {
    s << "<text x=\"" << num(X(std::log10(base))) << "\" y=\"" << num(kTop + ph + 20)
      << "\" text-anchor=\"middle\">" << tick_label(base) << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); ++e) {
    s << "<line x1=\"" << num(kLeft - 6) << "\" y1=\"" << num(Y(e)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(Y(e)) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << num(kLeft - 10) << "\" y=\"" << num(Y(e) + 4) << "\" text-anchor=\"end\">1e" << e
      << "</text>\n";
  }
  s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">m</text>\n";
  s << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << num(kTop + ph / 2) << ")\">median relative error</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    const auto& [method, med] = series[i];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [m, e] : med) {
      s << (first ? "" : " ") << num(X(std::log10(static_cast<double>(m)))) << ',' << num(Y(std::log10(e)));
      first = false;
    }
    s << "\"/>\n";
    for (const auto& [m, e] : med) {
      s << "<circle cx=\"" << num(X(std::log10(static_cast<double>(m)))) << "\" cy=\"" << num(Y(std::log10(e)))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 15 + 20.0 * static_cast<double>(i);
    s << "<line x1=\"" << num(kWidth - kRight + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kWidth - kRight + 40)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    s << "<text x=\"" << num(kWidth - kRight + 45) << "\" y=\"" << num(ly + 4) << "\">" << method << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw PreconditionError("emit_plot: no rows");
  const std::string svg = render_plot(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("emit_plot: cannot write " + path);
  out << svg;
  if (!out) throw Error("emit_plot: write failed for " + path);
}

}  // namespace wavecs
