#pragma once

#include <string>

#include "mimolink/experiment.hpp"

namespace mimolink {

// Renders one metric of a sweep result as a self-contained SVG: one
// polyline per (scheme, nr[, rho]) series over the SNR axis, with axes,
// tick labels and a legend. No external assets.
std::string render_svg(const SweepResult& result, const std::string& metric);

void plot_svg(const SweepResult& result, const std::string& metric,
              const std::string& path);

}  // namespace mimolink
