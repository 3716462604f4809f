#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hetvar/plot.hpp"
#include "hetvar/report.hpp"
#include "hetvar/simulation.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& arg) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(arg);
  while (std::getline(is, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// bare ssu/smu/fpu ids pick up the --mode suffix
std::vector<std::string> expand_modes(std::vector<std::string> ids, const std::string& mode) {
  for (auto& id : ids) {
    if (id == "ssu" || id == "smu" || id == "fpu") id += "-" + mode;
  }
  return ids;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneity-variance estimation for log-odds-ratio meta-analysis"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "estimate tau2 on a dataset of 2x2 tables");
  std::string in_path, out_path, estimators_arg, intervals_arg;
  std::string policy_arg = "only", mode_arg = "model";
  double level = 0.95;
  analyze->add_option("--input", in_path, "CSV of study_id,x_t,n_t,x_c,n_c")->required();
  analyze->add_option("--estimators", estimators_arg, "comma-separated point estimator ids");
  analyze->add_option("--intervals", intervals_arg, "comma-separated interval ids");
  analyze->add_option("--policy", policy_arg, "half-correction policy: only|always")
      ->check(CLI::IsMember({"only", "always"}));
  analyze->add_option("--mode", mode_arg, "C_i mode for bare ssu/smu/fpu ids: model|naive")
      ->check(CLI::IsMember({"model", "naive"}));
  analyze->add_option("--level", level, "confidence level (default 0.95)");
  analyze->add_option("--out", out_path, "write the report here instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a scenario grid and write metrics CSV");
  std::string config_path, sim_out;
  int reps_override = 0;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  simulate->add_option("--config", config_path, "flat key-value grid config")->required();
  simulate->add_option("--out", sim_out, "metrics CSV output path")->required();
  simulate->add_option("--reps", reps_override, "override the config's replicate count");
  simulate->add_option("--seed", seed_override, "override the config's master seed")
      ->each([&](const std::string&) { seed_set = true; });

  // plot
  auto* plot = app.add_subcommand("plot", "render metric panels from a metrics CSV");
  std::string metrics_path, plot_out = ".", metric = "bias";
  double plot_level = 0.95;
  plot->add_option("--input", metrics_path, "metrics CSV from 'simulate'")->required();
  plot->add_option("--metric", metric, "bias|median_bias|coverage|miss_left|miss_right")
      ->check(CLI::IsMember({"bias", "median_bias", "coverage", "miss_left", "miss_right"}));
  plot->add_option("--out", plot_out, "output directory for SVG files");
  plot->add_option("--level", plot_level, "nominal level line for coverage panels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      hetvar::AnalyzeOptions opts;
      opts.estimators = expand_modes(split_csv_list(estimators_arg), mode_arg);
      opts.intervals = expand_modes(split_csv_list(intervals_arg), mode_arg);
      opts.policy = policy_arg == "always" ? hetvar::AdjustmentPolicy::Always
                                           : hetvar::AdjustmentPolicy::OnlyIfZero;
      opts.level = level;
      const std::string report = hetvar::analyze_report(hetvar::load_dataset(in_path), opts);
      if (out_path.empty()) {
        std::cout << report;
      } else {
        write_text(out_path, report);
      }
    } else if (*simulate) {
      hetvar::GridConfig grid = hetvar::load_grid_config(config_path);
      if (reps_override > 0) grid.reps = reps_override;
      if (seed_set) grid.seed = seed_override;
      hetvar::full_grid(grid, sim_out, &std::cerr);
    } else if (*plot) {
      hetvar::PlotOptions opts;
      opts.metric = metric;
      opts.level = plot_level;
      const auto files =
          hetvar::render_metric_panels(hetvar::read_metrics_csv(metrics_path), opts);
      std::filesystem::create_directories(plot_out);
      for (const auto& [name, svg] : files) {
        const auto path = std::filesystem::path(plot_out) / name;
        write_text(path.string(), svg);
        std::cerr << "wrote " << path.string() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
