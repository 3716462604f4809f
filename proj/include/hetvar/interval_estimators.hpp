#pragma once

#include <functional>
#include <string>

#include "hetvar/meta_sample.hpp"
#include "hetvar/quadform.hpp"

namespace hetvar {

/// Confidence interval for tau^2. An upper endpoint that ran into the
/// bracket cap is reported at the cap with upper_capped set; a profile
/// lying entirely below the band at tau^2 = 0 collapses to {0} with
/// degenerate set.
struct TauInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  std::string method_tag;
  bool degenerate = false;
  bool upper_capped = false;
  bool converged = true;  ///< pl only: ML stage convergence
};

inline constexpr double kIntervalCap = 100.0;

/// Profile interval from the Q_F CDF under the conditional variance law.
TauInterval fpc(const MetaSample& sample, double level);

/// Same under the unconditional law; C_i model-based or naive per mode.
TauInterval fpu(const MetaSample& sample, const PitEstimationMode& mode, double level);

/// Q-profile: generalized-Q bounds against chi-square(K-1) quantiles.
TauInterval qp(const MetaSample& sample, double level);

/// Profile-likelihood interval (ML likelihood, theta profiled out).
TauInterval pl(const MetaSample& sample, double level);

/// Kulinskaya-Dollinger interval hook; unregistered use raises
/// UnsupportedEstimator.
using KdIntervalEstimator = std::function<TauInterval(const MetaSample&, double)>;
void register_kd_interval(KdIntervalEstimator estimator);
bool kd_interval_registered();
TauInterval kd_interval(const MetaSample& sample, double level);

}  // namespace hetvar
