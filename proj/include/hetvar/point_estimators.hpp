#pragma once

#include <functional>
#include <string>

#include "hetvar/meta_sample.hpp"
#include "hetvar/quadform.hpp"

namespace hetvar {

struct TauPointResult {
  double tau2_hat = 0.0;
  bool truncated = false;  ///< raw solution was negative or the profile root was not found
  bool converged = true;   ///< iterative methods only
  int iterations = 0;
  std::string method_tag;
};

struct UnsupportedEstimator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Moment estimator from the first moment of Q_F (ESS weights),
/// unconditional variances: the tau^2 coefficient carries C_i.
TauPointResult ssu(const MetaSample& sample, const PitEstimationMode& mode);

/// Same moment equation with conditional variances (C_i = 1).
TauPointResult ssc(const MetaSample& sample);

/// Median-unbiased: tau^2 with F(Q_F | tau^2) = 1/2 under the
/// conditional variance law.
TauPointResult smc(const MetaSample& sample);

/// Median-unbiased under the unconditional law, model or naive C_i.
TauPointResult smu(const MetaSample& sample, const PitEstimationMode& mode);

/// DerSimonian-Laird, inverse-variance weights.
TauPointResult dl(const MetaSample& sample);

/// Mandel-Paule: root of the generalized Q profile at K - 1.
TauPointResult mp(const MetaSample& sample);

/// Restricted maximum likelihood, fixed-point iteration with
/// projection to zero; carries the iteration count and a convergence flag.
TauPointResult reml(const MetaSample& sample);

/// Kulinskaya-Dollinger hook. The corrected-moment estimator is not
/// shipped; callers may register an implementation, otherwise invoking
/// kd() raises UnsupportedEstimator.
using KdPointEstimator = std::function<TauPointResult(const MetaSample&)>;
void register_kd_estimator(KdPointEstimator estimator);
bool kd_estimator_registered();
TauPointResult kd(const MetaSample& sample);

}  // namespace hetvar
