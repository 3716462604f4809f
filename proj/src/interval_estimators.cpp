#include "hetvar/interval_estimators.hpp"

#include <cmath>

#include "hetvar/point_estimators.hpp"
#include "hetvar/special_functions.hpp"

namespace hetvar {

namespace {

void require_k3(const MetaSample& sample, const char* who) {
  if (sample.size() < 3) {
    throw std::invalid_argument(std::string(who) + ": need K >= 3");
  }
}

void require_level(double level, const char* who) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": level must be in (0,1)");
  }
}

TauInterval profile_interval(const MetaSample& sample, const VarianceLaw& law, double level,
                             std::string tag) {
  const double alpha = 1.0 - level;
  const double q_f = q_statistic(sample, sample.ess);
  TauInterval ci;
  ci.level = level;
  ci.method_tag = std::move(tag);

  const ProfileRootResult up =
      profile_root(sample, sample.ess, law, q_f, 0.5 * alpha, 5.0, kIntervalCap);
  if (up.status == ProfileRootResult::Status::BelowZero) {
    // whole profile sits below alpha/2: report {0}
    ci.degenerate = true;
    return ci;
  }
  ci.upper = up.tau2;
  ci.upper_capped = up.status == ProfileRootResult::Status::AboveCap;

  const ProfileRootResult lo =
      profile_root(sample, sample.ess, law, q_f, 1.0 - 0.5 * alpha, 5.0, kIntervalCap);
  ci.lower = lo.found() ? lo.tau2 : (lo.status == ProfileRootResult::Status::AboveCap
                                         ? kIntervalCap
                                         : 0.0);
  return ci;
}

}  // namespace

TauInterval fpc(const MetaSample& sample, double level) {
  require_k3(sample, "fpc");
  require_level(level, "fpc");
  return profile_interval(sample, VarianceLaw::conditional(), level, "fpc");
}

TauInterval fpu(const MetaSample& sample, const PitEstimationMode& mode, double level) {
  require_k3(sample, "fpu");
  require_level(level, "fpu");
  const bool model = mode.kind == PitEstimationMode::Kind::ModelBased;
  return profile_interval(
      sample, model ? VarianceLaw::unconditional_model() : VarianceLaw::unconditional_naive(),
      level, model ? "fpu-model" : "fpu-naive");
}

TauInterval qp(const MetaSample& sample, double level) {
  require_k3(sample, "qp");
  require_level(level, "qp");
  const double alpha = 1.0 - level;
  const double df = sample.size() - 1;
  const double chi_lo = chi_square_quantile(0.5 * alpha, df);
  const double chi_hi = chi_square_quantile(1.0 - 0.5 * alpha, df);

  TauInterval ci;
  ci.level = level;
  ci.method_tag = "qp";

  const auto root = [&](double target) {
    // generalized Q decreases in tau2; bisect the crossing
    double lo = 0.0;
    double hi = 5.0;
    while (generalized_q(sample, hi) >= target) {
      lo = hi;
      hi *= 2.0;
      if (hi > kIntervalCap) return kIntervalCap;
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (generalized_q(sample, mid) >= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  const double q0 = generalized_q(sample, 0.0);
  if (q0 < chi_lo) {
    ci.degenerate = true;
    return ci;
  }
  ci.upper = root(chi_lo);
  ci.upper_capped = ci.upper == kIntervalCap;
  ci.lower = q0 <= chi_hi ? 0.0 : root(chi_hi);
  return ci;
}

namespace {

/// Profile log-likelihood of tau2 with theta replaced by the
/// inverse-variance-plus-tau weighted mean (constants dropped).
double profile_loglik(const MetaSample& sample, double tau2) {
  const Eigen::ArrayXd t = sample.thetas();
  const Eigen::ArrayXd w = (sample.variances() + tau2).inverse();
  const double mu = (w * t).sum() / w.sum();
  return -0.5 * ((-w.log()).sum() + (w * (t - mu).square()).sum());
}

double ml_tau2(const MetaSample& sample, bool& converged, int& iterations) {
  const Eigen::ArrayXd t = sample.thetas();
  const Eigen::ArrayXd v = sample.variances();
  double tau2 = std::max(0.0, dl(sample).tau2_hat);
  converged = false;
  for (int it = 1; it <= 200; ++it) {
    const Eigen::ArrayXd w = (v + tau2).inverse();
    const double mu = (w * t).sum() / w.sum();
    const Eigen::ArrayXd w2 = w.square();
    const double next = std::max(0.0, (w2 * ((t - mu).square() - v)).sum() / w2.sum());
    iterations = it;
    if (std::fabs(next - tau2) < 1e-10) {
      converged = true;
      return next;
    }
    tau2 = next;
  }
  return tau2;
}

}  // namespace

TauInterval pl(const MetaSample& sample, double level) {
  require_k3(sample, "pl");
  require_level(level, "pl");
  TauInterval ci;
  ci.level = level;
  ci.method_tag = "pl";

  int iterations = 0;
  double tau2_ml = ml_tau2(sample, ci.converged, iterations);
  const double ll_max = profile_loglik(sample, tau2_ml);
  const double threshold = chi_square_quantile(level, 1.0);
  const auto deviance = [&](double tau2) {
    return 2.0 * (ll_max - profile_loglik(sample, tau2));
  };

  if (deviance(0.0) <= threshold) {
    ci.lower = 0.0;
  } else {
    double lo = 0.0;
    double hi = tau2_ml;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (deviance(mid) > threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    ci.lower = 0.5 * (lo + hi);
  }

  double hi = std::max(1.0, 2.0 * tau2_ml);
  while (deviance(hi) <= threshold) {
    hi *= 2.0;
    if (hi > kIntervalCap) break;
  }
  if (hi > kIntervalCap && deviance(kIntervalCap) <= threshold) {
    ci.upper = kIntervalCap;
    ci.upper_capped = true;
  } else {
    double lo = tau2_ml;
    hi = std::min(hi, kIntervalCap);
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (deviance(mid) <= threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    ci.upper = 0.5 * (lo + hi);
  }
  return ci;
}

namespace {
KdIntervalEstimator& kd_interval_slot() {
  static KdIntervalEstimator slot;
  return slot;
}
}  // namespace

void register_kd_interval(KdIntervalEstimator estimator) {
  kd_interval_slot() = std::move(estimator);
}

bool kd_interval_registered() { return static_cast<bool>(kd_interval_slot()); }

TauInterval kd_interval(const MetaSample& sample, double level) {
  if (!kd_interval_registered()) {
    throw UnsupportedEstimator("kd interval: no implementation registered");
  }
  TauInterval ci = kd_interval_slot()(sample, level);
  ci.method_tag = "kd";
  return ci;
}

}  // namespace hetvar
