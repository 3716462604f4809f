#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hetvar/simulation.hpp"

namespace hetvar {

struct PlotOptions {
  std::string metric = "bias";  ///< bias|median_bias|coverage|miss_left|miss_right
  double level = 0.95;          ///< nominal line drawn on coverage panels
};

/// Renders one SVG per (p_c, theta) present in the rows: a panel grid
/// over (sizes, K), one polyline per (method, policy) against tau2.
/// Solid lines: "only" policy / model-based C; dashed: "always" /
/// naive. Returns (filename, svg) pairs.
std::vector<std::pair<std::string, std::string>> render_metric_panels(
    const std::vector<MetricsRow>& rows, const PlotOptions& opts);

}  // namespace hetvar
