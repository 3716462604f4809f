#pragma once

#include <Eigen/Core>
#include <vector>

#include "hetvar/effects.hpp"
#include "hetvar/study.hpp"

namespace hetvar {

/// A meta-analysis sample: K per-study effect estimates plus the fixed
/// effective-sample-size weights derived from the raw arm sizes.
struct MetaSample {
  std::vector<EffectEstimate> studies;
  Eigen::ArrayXd ess;

  int size() const { return static_cast<int>(studies.size()); }
  Eigen::ArrayXd thetas() const;
  Eigen::ArrayXd variances() const;
};

struct WeightScheme {
  enum class Kind { EffectiveSampleSize, InverseVariance, InverseVariancePlusTau };
  Kind kind = Kind::EffectiveSampleSize;
  double tau2 = 0.0;  ///< used by InverseVariancePlusTau only

  static WeightScheme ess() { return {Kind::EffectiveSampleSize, 0.0}; }
  static WeightScheme inverse_variance() { return {Kind::InverseVariance, 0.0}; }
  static WeightScheme inverse_variance_plus_tau(double tau2);
};

Eigen::ArrayXd weights(const MetaSample& sample, const WeightScheme& scheme);

double weighted_mean(const MetaSample& sample, const Eigen::ArrayXd& w);

/// Cochran's Q under the given weights, two-pass form.
double q_statistic(const MetaSample& sample, const Eigen::ArrayXd& w);

/// Q with inverse-variance weights recomputed at v^2 + tau2; the
/// profile that Mandel-Paule and Q-profile methods invert.
double generalized_q(const MetaSample& sample, double tau2);

/// Per-study C_i under the given mode (ModelBased carries the overall
/// LOR inside the mode).
Eigen::ArrayXd c_multipliers(const MetaSample& sample, const PitEstimationMode& mode);

/// ESS-weighted mean of the per-study LOR estimates (the SSW mean).
double ess_weighted_lor(const MetaSample& sample);

/// Mode with the ModelBased overall LOR resolved from the sample itself.
PitEstimationMode resolve_model_mode(const MetaSample& sample);

/// First moment of Q_F at the given tau2: W * sum q_i (1 - q_i) E(v_i^2)
/// with E(v_i^2) = v_i^2 + tau2 * C_i.
double expected_qf(const MetaSample& sample, double tau2, const PitEstimationMode& mode);

/// Builds a sample from raw tables: ESS from the raw sizes, then the
/// policy adjustment, then effect estimation (naive C_i; estimators
/// re-derive C_i per mode). Tables must already be free of double-zero
/// and double-n studies.
MetaSample make_meta_sample(const std::vector<Study2x2>& raw_tables, AdjustmentPolicy policy);

}  // namespace hetvar
