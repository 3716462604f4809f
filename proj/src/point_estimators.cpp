#include "hetvar/point_estimators.hpp"

#include <cmath>

namespace hetvar {

namespace {

void require_k3(const MetaSample& sample, const char* who) {
  if (sample.size() < 3) {
    throw std::invalid_argument(std::string(who) + ": need K >= 3");
  }
}

TauPointResult moment_estimate(const MetaSample& sample, const Eigen::ArrayXd& c,
                               std::string tag) {
  const Eigen::ArrayXd& w = sample.ess;
  const double W = w.sum();
  const Eigen::ArrayXd q = w / W;
  const double q_f = q_statistic(sample, w);
  const double raw = (q_f / W - (q * (1.0 - q) * sample.variances()).sum()) /
                     (q * (1.0 - q) * c).sum();
  TauPointResult r;
  r.tau2_hat = std::max(0.0, raw);
  r.truncated = raw < 0.0;
  r.method_tag = std::move(tag);
  return r;
}

TauPointResult median_estimate(const MetaSample& sample, const VarianceLaw& law,
                               std::string tag) {
  const double q_f = q_statistic(sample, sample.ess);
  const ProfileRootResult root = profile_root(sample, sample.ess, law, q_f, 0.5);
  TauPointResult r;
  r.tau2_hat = root.found() ? root.tau2 : 0.0;
  r.truncated = !root.found();
  r.method_tag = std::move(tag);
  return r;
}

}  // namespace

TauPointResult ssu(const MetaSample& sample, const PitEstimationMode& mode) {
  require_k3(sample, "ssu");
  const char* suffix = mode.kind == PitEstimationMode::Kind::ModelBased ? "ssu-model" : "ssu-naive";
  return moment_estimate(sample, c_multipliers(sample, mode), suffix);
}

TauPointResult ssc(const MetaSample& sample) {
  require_k3(sample, "ssc");
  return moment_estimate(sample, Eigen::ArrayXd::Ones(sample.size()), "ssc");
}

TauPointResult smc(const MetaSample& sample) {
  require_k3(sample, "smc");
  return median_estimate(sample, VarianceLaw::conditional(), "smc");
}

TauPointResult smu(const MetaSample& sample, const PitEstimationMode& mode) {
  require_k3(sample, "smu");
  const bool model = mode.kind == PitEstimationMode::Kind::ModelBased;
  return median_estimate(
      sample, model ? VarianceLaw::unconditional_model() : VarianceLaw::unconditional_naive(),
      model ? "smu-model" : "smu-naive");
}

TauPointResult dl(const MetaSample& sample) {
  require_k3(sample, "dl");
  const Eigen::ArrayXd w = weights(sample, WeightScheme::inverse_variance());
  const double q_iv = q_statistic(sample, w);
  const double s1 = w.sum();
  const double s2 = w.square().sum();
  const double raw = (q_iv - (sample.size() - 1)) / (s1 - s2 / s1);
  TauPointResult r;
  r.tau2_hat = std::max(0.0, raw);
  r.truncated = raw < 0.0;
  r.method_tag = "dl";
  return r;
}

TauPointResult mp(const MetaSample& sample) {
  require_k3(sample, "mp");
  const double target = sample.size() - 1;
  TauPointResult r;
  r.method_tag = "mp";
  if (generalized_q(sample, 0.0) < target) {
    r.truncated = true;
    return r;
  }
  // Q_gen decreases to 0, so a bracket always appears.
  double lo = 0.0;
  double hi = 5.0;
  while (generalized_q(sample, hi) >= target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) {
      throw std::runtime_error("mp: profile failed to drop below K - 1");
    }
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (generalized_q(sample, mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.tau2_hat = 0.5 * (lo + hi);
  return r;
}

TauPointResult reml(const MetaSample& sample) {
  require_k3(sample, "reml");
  const Eigen::ArrayXd t = sample.thetas();
  const Eigen::ArrayXd v = sample.variances();

  TauPointResult r;
  r.method_tag = "reml";
  double tau2 = std::max(0.0, dl(sample).tau2_hat);
  double raw = tau2;
  for (int it = 1; it <= 200; ++it) {
    const Eigen::ArrayXd w = (v + tau2).inverse();
    const double mu = (w * t).sum() / w.sum();
    const Eigen::ArrayXd w2 = w.square();
    raw = (w2 * ((t - mu).square() - v)).sum() / w2.sum() + 1.0 / w.sum();
    const double next = std::max(0.0, raw);
    r.iterations = it;
    if (std::fabs(next - tau2) < 1e-8) {
      tau2 = next;
      r.tau2_hat = tau2;
      r.truncated = tau2 == 0.0 && raw < 0.0;
      return r;
    }
    tau2 = next;
  }
  r.tau2_hat = tau2;
  r.truncated = tau2 == 0.0 && raw < 0.0;
  r.converged = false;
  return r;
}

namespace {
KdPointEstimator& kd_slot() {
  static KdPointEstimator slot;
  return slot;
}
}  // namespace

void register_kd_estimator(KdPointEstimator estimator) { kd_slot() = std::move(estimator); }

bool kd_estimator_registered() { return static_cast<bool>(kd_slot()); }

TauPointResult kd(const MetaSample& sample) {
  if (!kd_estimator_registered()) {
    throw UnsupportedEstimator("kd: no implementation registered");
  }
  TauPointResult r = kd_slot()(sample);
  r.method_tag = "kd";
  return r;
}

}  // namespace hetvar
