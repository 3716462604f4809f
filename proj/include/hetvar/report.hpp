#pragma once

#include <string>
#include <vector>

#include "hetvar/dataset.hpp"
#include "hetvar/simulation.hpp"

namespace hetvar {

struct AnalyzeOptions {
  std::vector<std::string> estimators;  ///< empty = all registered-able ids except kd
  std::vector<std::string> intervals;
  AdjustmentPolicy policy = AdjustmentPolicy::OnlyIfZero;
  double level = 0.95;
};

/// Runs the requested methods on a dataset and renders a plain-text
/// report: K, discards, Q statistics, ESS weights, then one line per
/// method with flags. Deterministic byte-for-byte for fixed inputs.
/// Throws if fewer than 3 studies survive the discards.
std::string analyze_report(const InputDataset& data, const AnalyzeOptions& opts);

}  // namespace hetvar
