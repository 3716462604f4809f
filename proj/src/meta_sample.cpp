#include "hetvar/meta_sample.hpp"

#include <cmath>
#include <stdexcept>

namespace hetvar {

Eigen::ArrayXd MetaSample::thetas() const {
  Eigen::ArrayXd t(size());
  for (int i = 0; i < size(); ++i) t[i] = studies[i].theta_hat;
  return t;
}

Eigen::ArrayXd MetaSample::variances() const {
  Eigen::ArrayXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = studies[i].v2_hat;
  return v;
}

WeightScheme WeightScheme::inverse_variance_plus_tau(double tau2) {
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) {
    throw std::invalid_argument("WeightScheme: tau2 must be finite and >= 0");
  }
  return {Kind::InverseVariancePlusTau, tau2};
}

Eigen::ArrayXd weights(const MetaSample& sample, const WeightScheme& scheme) {
  switch (scheme.kind) {
    case WeightScheme::Kind::EffectiveSampleSize:
      return sample.ess;
    case WeightScheme::Kind::InverseVariance:
      return sample.variances().inverse();
    case WeightScheme::Kind::InverseVariancePlusTau:
      return (sample.variances() + scheme.tau2).inverse();
  }
  throw std::logic_error("weights: unknown scheme");
}

double weighted_mean(const MetaSample& sample, const Eigen::ArrayXd& w) {
  if (w.size() != sample.size()) {
    throw std::invalid_argument("weighted_mean: weight length mismatch");
  }
  return (w * sample.thetas()).sum() / w.sum();
}

double q_statistic(const MetaSample& sample, const Eigen::ArrayXd& w) {
  if (sample.size() < 2) {
    throw std::invalid_argument("q_statistic: need K >= 2");
  }
  const Eigen::ArrayXd t = sample.thetas();
  const double mean = (w * t).sum() / w.sum();
  return (w * (t - mean).square()).sum();
}

double generalized_q(const MetaSample& sample, double tau2) {
  return q_statistic(sample, weights(sample, WeightScheme::inverse_variance_plus_tau(tau2)));
}

Eigen::ArrayXd c_multipliers(const MetaSample& sample, const PitEstimationMode& mode) {
  Eigen::ArrayXd c(sample.size());
  for (int i = 0; i < sample.size(); ++i) c[i] = c_multiplier(sample.studies[i], mode);
  return c;
}

double ess_weighted_lor(const MetaSample& sample) {
  return (sample.ess * sample.thetas()).sum() / sample.ess.sum();
}

PitEstimationMode resolve_model_mode(const MetaSample& sample) {
  return PitEstimationMode::model_based(ess_weighted_lor(sample));
}

double expected_qf(const MetaSample& sample, double tau2, const PitEstimationMode& mode) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("expected_qf: tau2 must be >= 0");
  const Eigen::ArrayXd w = sample.ess;
  const double W = w.sum();
  const Eigen::ArrayXd q = w / W;
  const Eigen::ArrayXd ev2 = sample.variances() + tau2 * c_multipliers(sample, mode);
  return W * (q * (1.0 - q) * ev2).sum();
}

MetaSample make_meta_sample(const std::vector<Study2x2>& raw_tables, AdjustmentPolicy policy) {
  MetaSample sample;
  const int k = static_cast<int>(raw_tables.size());
  sample.studies.reserve(k);
  sample.ess.resize(k);
  for (int i = 0; i < k; ++i) {
    sample.ess[i] = effective_sample_size(raw_tables[i]);
    const Study2x2 adj = adjust_counts(raw_tables[i], policy);
    sample.studies.push_back(estimate_effect(adj, PitEstimationMode::naive()));
  }
  return sample;
}

}  // namespace hetvar
