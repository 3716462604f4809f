#include "hetvar/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hetvar/format.hpp"

namespace hetvar {

namespace {

double metric_value(const MetricsRow& row, const std::string& metric) {
  if (metric == "bias") return row.bias;
  if (metric == "median_bias") return row.median_bias;
  if (metric == "coverage") return row.coverage;
  if (metric == "miss_left") return row.miss_left;
  if (metric == "miss_right") return row.miss_right;
  throw std::invalid_argument("unknown metric: " + metric);
}

// equal-size panels first, then the skewed sets, each by size
std::pair<int, int> sizes_sort_key(const std::string& label) {
  if (label.rfind("nbar", 0) == 0) return {1, std::stoi(label.substr(4))};
  if (label.rfind('n', 0) == 0) return {0, std::stoi(label.substr(1))};
  return {2, 0};
}

const char* series_color(const std::string& method) {
  static const std::vector<std::pair<std::string, const char*>> palette = {
      {"dl", "#1f77b4"}, {"reml", "#ff7f0e"}, {"mp", "#2ca02c"},  {"ssc", "#d62728"},
      {"smc", "#9467bd"}, {"ssu", "#8c564b"}, {"smu", "#e377c2"}, {"fpc", "#17becf"},
      {"fpu", "#bcbd22"}, {"qp", "#7f7f7f"},  {"pl", "#aec7e8"},  {"kd", "#000000"}};
  for (const auto& [base, color] : palette) {
    if (method == base || method.rfind(base + "-", 0) == 0) return color;
  }
  return "#333333";
}

bool series_dashed(const std::string& method, const std::string& policy) {
  if (method.find("-naive") != std::string::npos) return true;
  if (method.find("-model") != std::string::npos) return false;
  return policy == "always";
}

std::string svg_num(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_metric_panels(
    const std::vector<MetricsRow>& rows, const PlotOptions& opts) {
  // keep only rows where the metric applies
  std::vector<MetricsRow> usable;
  for (const auto& row : rows) {
    if (!std::isnan(metric_value(row, opts.metric))) usable.push_back(row);
  }
  if (usable.empty()) {
    throw std::invalid_argument("no rows carry metric '" + opts.metric + "'");
  }

  std::map<std::pair<double, double>, std::vector<MetricsRow>> facets;
  for (const auto& row : usable) facets[{row.p_c, row.theta}].push_back(row);

  const double panel_w = 280, panel_h = 210, margin = 52, gap = 26, header = 48;

  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [facet_key, facet_rows] : facets) {
    const auto [p_c, theta] = facet_key;

    std::set<std::pair<std::pair<int, int>, std::string>> size_keys;
    std::set<int> k_values;
    std::set<std::pair<std::string, std::string>> series_set;
    for (const auto& row : facet_rows) {
      size_keys.insert({sizes_sort_key(row.sizes_label), row.sizes_label});
      k_values.insert(row.k);
      series_set.insert({row.method, row.policy});
    }
    std::vector<std::string> size_labels;
    for (const auto& [key, label] : size_keys) size_labels.push_back(label);
    std::vector<int> ks(k_values.begin(), k_values.end());

    const int ncols = static_cast<int>(size_labels.size());
    const int nrows = static_cast<int>(ks.size());
    const double width = margin + ncols * (panel_w + gap) + margin;
    const double height = header + nrows * (panel_h + gap) + margin;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">"
        << opts.metric << " of tau2 estimates, p_c=" << format_double(p_c)
        << ", theta=" << format_double(theta) << "</text>\n";

    // legend
    double lx = margin;
    for (const auto& [method, policy] : series_set) {
      svg << "<line x1=\"" << lx << "\" y1=\"36\" x2=\"" << lx + 22 << "\" y2=\"36\" stroke=\""
          << series_color(method) << "\" stroke-width=\"2\""
          << (series_dashed(method, policy) ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      svg << "<text x=\"" << lx + 26 << "\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\">"
          << method << " " << policy << "</text>\n";
      lx += 34 + 7.0 * (method.size() + policy.size());
    }

    for (int r = 0; r < nrows; ++r) {
      for (int c = 0; c < ncols; ++c) {
        const double x0 = margin + c * (panel_w + gap);
        const double y0 = header + r * (panel_h + gap);

        std::vector<MetricsRow> panel;
        for (const auto& row : facet_rows) {
          if (row.k == ks[r] && row.sizes_label == size_labels[c]) panel.push_back(row);
        }
        svg << "<g>\n";
        svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << panel_w << "\" height=\""
            << panel_h << "\" fill=\"none\" stroke=\"#888888\"/>\n";
        svg << "<text x=\"" << x0 + 6 << "\" y=\"" << y0 + 16
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << size_labels[c]
            << ", K=" << ks[r] << "</text>\n";
        if (panel.empty()) {
          svg << "</g>\n";
          continue;
        }

        double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
        for (const auto& row : panel) {
          const double v = metric_value(row, opts.metric);
          x_min = std::min(x_min, row.tau2);
          x_max = std::max(x_max, row.tau2);
          y_min = std::min(y_min, v);
          y_max = std::max(y_max, v);
        }
        if (opts.metric == "coverage") {
          y_min = std::min(y_min, opts.level);
          y_max = std::max(y_max, opts.level);
        }
        if (x_max == x_min) x_max = x_min + 1.0;
        const double y_pad = (y_max - y_min) * 0.08 + 1e-9;
        y_min -= y_pad;
        y_max += y_pad;

        const double px0 = x0 + 34, px1 = x0 + panel_w - 10;
        const double py0 = y0 + panel_h - 26, py1 = y0 + 26;
        const auto sx = [&](double x) { return px0 + (x - x_min) / (x_max - x_min) * (px1 - px0); };
        const auto sy = [&](double y) { return py0 + (y - y_min) / (y_max - y_min) * (py1 - py0); };

        // axes with end-point labels
        svg << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px1 << "\" y2=\"" << py0
            << "\" stroke=\"#444444\"/>\n";
        svg << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px0 << "\" y2=\"" << py1
            << "\" stroke=\"#444444\"/>\n";
        svg << "<text x=\"" << px0 << "\" y=\"" << py0 + 16
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(x_min)
            << "</text>\n";
        svg << "<text x=\"" << px1 - 16 << "\" y=\"" << py0 + 16
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(x_max)
            << "</text>\n";
        svg << "<text x=\"" << x0 + 2 << "\" y=\"" << py0
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << svg_num(y_min) << "</text>\n";
        svg << "<text x=\"" << x0 + 2 << "\" y=\"" << py1
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << svg_num(y_max) << "</text>\n";

        if (opts.metric == "coverage") {
          svg << "<line class=\"nominal\" x1=\"" << px0 << "\" y1=\"" << sy(opts.level)
              << "\" x2=\"" << px1 << "\" y2=\"" << sy(opts.level)
              << "\" stroke=\"#999999\" stroke-dasharray=\"2,3\"/>\n";
        } else if (y_min < 0.0 && y_max > 0.0) {
          svg << "<line x1=\"" << px0 << "\" y1=\"" << sy(0.0) << "\" x2=\"" << px1 << "\" y2=\""
              << sy(0.0) << "\" stroke=\"#cccccc\"/>\n";
        }

        for (const auto& [method, policy] : series_set) {
          std::vector<std::pair<double, double>> pts;
          for (const auto& row : panel) {
            if (row.method == method && row.policy == policy) {
              pts.emplace_back(row.tau2, metric_value(row, opts.metric));
            }
          }
          if (pts.empty()) continue;
          std::sort(pts.begin(), pts.end());
          svg << "<polyline fill=\"none\" stroke=\"" << series_color(method)
              << "\" stroke-width=\"1.5\""
              << (series_dashed(method, policy) ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
          for (std::size_t i = 0; i < pts.size(); ++i) {
            svg << (i ? " " : "") << svg_num(sx(pts[i].first)) << "," << svg_num(sy(pts[i].second));
          }
          svg << "\"/>\n";
        }
        svg << "</g>\n";
      }
    }
    svg << "</svg>\n";

    std::string fname = opts.metric + "_pc" + format_double(p_c) + "_theta" +
                        format_double(theta) + ".svg";
    out.emplace_back(std::move(fname), svg.str());
  }
  return out;
}

}  // namespace hetvar
