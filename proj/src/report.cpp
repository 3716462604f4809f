#include "hetvar/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hetvar/format.hpp"

namespace hetvar {

namespace {

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::vector<std::string> default_estimators() {
  std::vector<std::string> ids = point_estimator_ids();
  std::erase(ids, "kd");
  return ids;
}

std::vector<std::string> default_intervals() {
  std::vector<std::string> ids = interval_estimator_ids();
  std::erase(ids, "kd");
  return ids;
}

}  // namespace

std::string analyze_report(const InputDataset& data, const AnalyzeOptions& opts) {
  MethodSet methods;
  methods.estimators = opts.estimators.empty() ? default_estimators() : opts.estimators;
  methods.intervals = opts.intervals.empty() ? default_intervals() : opts.intervals;
  methods.policies = {opts.policy};
  methods.level = opts.level;
  validate_methods(methods);

  std::vector<Study2x2> tables;
  std::vector<std::string> dropped_zero, dropped_n;
  for (const auto& row : data.rows) {
    if (is_double_zero(row.table)) {
      dropped_zero.push_back(row.study_id);
    } else if (is_double_n(row.table)) {
      dropped_n.push_back(row.study_id);
    } else {
      tables.push_back(row.table);
    }
  }
  if (tables.size() < 3) {
    throw std::runtime_error("analyze: fewer than 3 studies remain after discarding double-zero/"
                             "double-n rows (" +
                             std::to_string(tables.size()) + " left)");
  }

  const MetaSample sample = make_meta_sample(tables, opts.policy);
  const double q_f = q_statistic(sample, sample.ess);
  const double q_iv = q_statistic(sample, weights(sample, WeightScheme::inverse_variance()));

  std::ostringstream os;
  os << "hetvar analyze\n";
  os << "studies: " << data.rows.size() << " read, " << tables.size() << " used";
  if (!dropped_zero.empty() || !dropped_n.empty()) {
    os << " (discarded";
    for (const auto& id : dropped_zero) os << " " << id << "[double-zero]";
    for (const auto& id : dropped_n) os << " " << id << "[double-n]";
    os << ")";
  }
  os << "\n";
  os << "policy: " << (opts.policy == AdjustmentPolicy::OnlyIfZero ? "only" : "always")
     << "   level: " << format_double(opts.level) << "\n";
  os << "K: " << sample.size() << "\n";
  os << "Q_F: " << fixed6(q_f) << "   Q_IV: " << fixed6(q_iv) << "\n";
  os << "ess weights:";
  for (int i = 0; i < sample.size(); ++i) os << " " << format_double(sample.ess[i]);
  os << "\n";
  os << "ess-weighted LOR: " << fixed6(ess_weighted_lor(sample)) << "\n";
  os << "\n";

  os << "point estimates\n";
  os << "  method      tau2       flags\n";
  for (const auto& id : methods.estimators) {
    const TauPointResult r = run_point_estimator(id, sample);
    os << "  " << std::left << std::setw(12) << id << std::right << fixed6(r.tau2_hat);
    std::vector<std::string> flags;
    if (r.truncated) flags.push_back("truncated");
    if (!r.converged) flags.push_back("non-converged");
    if (!flags.empty()) {
      os << "   ";
      for (std::size_t i = 0; i < flags.size(); ++i) os << (i ? "," : "") << flags[i];
    }
    os << "\n";
  }
  os << "\n";
  os << "intervals (level " << format_double(opts.level) << ")\n";
  os << "  method      lower      upper      flags\n";
  for (const auto& id : methods.intervals) {
    const TauInterval ci = run_interval_estimator(id, sample, opts.level);
    os << "  " << std::left << std::setw(12) << id << std::right << fixed6(ci.lower) << "   "
       << fixed6(ci.upper);
    std::vector<std::string> flags;
    if (ci.degenerate) flags.push_back("degenerate");
    if (ci.upper_capped) flags.push_back("upper-capped");
    if (!ci.converged) flags.push_back("non-converged");
    if (!flags.empty()) {
      os << "   ";
      for (std::size_t i = 0; i < flags.size(); ++i) os << (i ? "," : "") << flags[i];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace hetvar
