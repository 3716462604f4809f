#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetvar/interval_estimators.hpp"
#include "hetvar/meta_sample.hpp"
#include "hetvar/point_estimators.hpp"
#include "hetvar/rng.hpp"

namespace hetvar {

/// One cell of the simulation grid.
struct ScenarioConfig {
  int k = 5;
  std::vector<int> sizes;   ///< per-study total sizes, length k
  std::string sizes_label;  ///< "n<total>" for equal sizes, "nbar<avg>" for the skewed sets
  double f = 0.5;           ///< control-arm fraction
  double p_c = 0.1;
  double theta = 0.0;
  double tau2 = 0.0;
  int reps = 1000;
  std::uint64_t seed = 0;
};

/// Throws with the offending field named; rejects non-integer arm sizes.
void validate_scenario(const ScenarioConfig& cfg);

/// Canonical cell key; hashing it gives the per-cell seed stream, so
/// results do not depend on sweep order.
std::string scenario_key(const ScenarioConfig& cfg);

/// One replicate of raw 2x2 tables: true effects from N(theta, tau2),
/// counts from the two binomials, double-zero and double-n studies
/// dropped. Empty when fewer than 3 studies survive.
std::optional<std::vector<Study2x2>> generate_replicate(const ScenarioConfig& cfg, Rng& rng);

/// Known stable identifiers.
const std::vector<std::string>& point_estimator_ids();
const std::vector<std::string>& interval_estimator_ids();
bool is_point_estimator_id(const std::string& id);
bool is_interval_estimator_id(const std::string& id);

TauPointResult run_point_estimator(const std::string& id, const MetaSample& sample);
TauInterval run_interval_estimator(const std::string& id, const MetaSample& sample, double level);

/// Which methods to run on each replicate. Policies apply to every
/// method except fpu, which always uses Always-adjusted counts.
struct MethodSet {
  std::vector<std::string> estimators;
  std::vector<std::string> intervals;
  std::vector<AdjustmentPolicy> policies{AdjustmentPolicy::OnlyIfZero};
  double level = 0.95;
};

void validate_methods(const MethodSet& methods);

/// Aggregated metrics for one (scenario, method, policy) combination.
/// Point rows carry bias and median bias; interval rows carry the
/// coverage triple; the unused fields are NaN.
struct MetricsRow {
  int k = 0;
  std::string sizes_label;
  double p_c = 0.0;
  double theta = 0.0;
  double tau2 = 0.0;
  std::string method;
  std::string policy;
  double bias = 0.0;
  double median_bias = 0.0;
  double coverage = 0.0;
  double miss_left = 0.0;
  double miss_right = 0.0;
  long effective_reps = 0;
  long errors = 0;  ///< method failures on surviving replicates (logged, not in the CSV)
};

/// Runs every requested method on every surviving replicate (all
/// methods see the same data) and aggregates the five metrics.
/// Replicates run in parallel; worker count is capped by the
/// HETVAR_THREADS environment variable.
std::vector<MetricsRow> run_scenario(const ScenarioConfig& cfg, const MethodSet& methods);

/// Full grid specification parsed from a flat key-value config file.
struct GridConfig {
  std::vector<int> k_values;
  std::vector<int> equal_sizes;   ///< total study sizes n
  std::vector<int> unequal_nbar;  ///< average sizes naming the skewed Table-style sets
  std::vector<double> p_c_values;
  std::vector<double> theta_values;
  std::vector<double> tau2_values;
  int reps = 1000;
  std::uint64_t seed = 0;
  MethodSet methods;
};

GridConfig parse_grid_config(std::istream& in);
GridConfig load_grid_config(const std::string& path);

/// Expands the grid into scenario cells in deterministic order; each
/// cell's seed is derived from (grid seed, cell key).
std::vector<ScenarioConfig> expand_grid(const GridConfig& grid);

/// The skewed five-study size set for a given average total, tiled to k
/// studies (k must be a multiple of 5).
std::vector<int> unequal_size_set(int nbar, int k);

/// Sweeps the grid and writes metrics CSV to out_path. Resumable:
/// cells whose full row set is already in the file are skipped; rows of
/// partially written cells are dropped and recomputed. Progress lines
/// go to `progress` when non-null.
void full_grid(const GridConfig& grid, const std::string& out_path, std::ostream* progress);

extern const char kMetricsCsvHeader[];
std::string metrics_row_csv(const MetricsRow& row);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

/// Worker count: HETVAR_THREADS if set, else hardware concurrency.
int worker_count();

}  // namespace hetvar
