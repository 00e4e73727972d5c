#include "mimolink/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "mimolink/errors.hpp"

namespace mimolink {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 660.0;   // legend lives to the right of this
constexpr double kTop = 40.0;
constexpr double kBottom = 500.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct SeriesKey {
  std::string scheme;
  int nr;
  std::string rho;
  auto operator<=>(const SeriesKey&) const = default;
};

}  // namespace

std::string render_svg(const SweepResult& result, const std::string& metric) {
  std::map<SeriesKey, std::vector<std::pair<double, double>>> series;
  std::set<std::string> metrics_seen;
  std::set<std::string> rhos;
  for (const SweepRow& r : result.rows) {
    metrics_seen.insert(r.metric);
    if (r.metric != metric) continue;
    if (!std::isfinite(r.value)) continue;
    series[SeriesKey{r.scheme, r.nr, r.rho.str()}].emplace_back(r.snr_db, r.value);
    rhos.insert(r.rho.str());
  }
  if (series.empty()) {
    std::string available;
    for (const std::string& m : metrics_seen) {
      if (!available.empty()) available += ", ";
      available += m;
    }
    throw ConfigError("no rows with metric '" + metric + "'; available: " +
                      (available.empty() ? "(none)" : available));
  }
  const bool label_rho = rhos.size() > 1;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto sx = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * (kRight - kLeft); };
  const auto sy = [&](double v) { return kBottom - (v - ymin) / (ymax - ymin) * (kBottom - kTop); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(kWidth) + " " +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";

  // Axes and ticks.
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\"/>\n";
  const int nticks = 6;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / nticks;
    const double px = sx(fx);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(px) +
           "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kBottom + 20) +
           "\" text-anchor=\"middle\">" + num(fx) + "</text>\n";
    const double fy = ymin + (ymax - ymin) * i / nticks;
    const double py = sy(fy);
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 9) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\">" + num(fy) + "</text>\n";
  }
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kBottom + 42) +
         "\" text-anchor=\"middle\">snr_db</text>\n";
  svg += "<text x=\"20\" y=\"" + num((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" " +
         "transform=\"rotate(-90 20 " + num((kTop + kBottom) / 2) + ")\">" + metric +
         "</text>\n";

  // Series.
  std::size_t idx = 0;
  for (const auto& [key, pts] : series) {
    const char* color = kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (const auto& [x, y] : pts) {
      if (!points.empty()) points += ' ';
      points += num(sx(x)) + "," + num(sy(y));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    std::string label = key.scheme + " nr=" + std::to_string(key.nr);
    if (label_rho) label += " rho=" + key.rho;
    const double ly = kTop + 18.0 * static_cast<double>(idx);
    svg += "<line x1=\"" + num(kRight + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(kRight + 45) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + num(kRight + 50) + "\" y=\"" + num(ly + 4) + "\">" + label +
           "</text>\n";
    ++idx;
  }
  svg += "</svg>\n";
  return svg;
}

void plot_svg(const SweepResult& result, const std::string& metric,
              const std::string& path) {
  const std::string svg = render_svg(result, metric);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << svg;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace mimolink
