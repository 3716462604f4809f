#include "hetvar/effects.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hetvar/special_functions.hpp"

namespace hetvar {

PitEstimationMode PitEstimationMode::model_based(double theta_hat_overall) {
  if (!std::isfinite(theta_hat_overall)) {
    throw std::invalid_argument("PitEstimationMode: overall LOR must be finite");
  }
  PitEstimationMode m;
  m.kind = Kind::ModelBased;
  m.theta_hat_overall = theta_hat_overall;
  return m;
}

double unconditional_multiplier(double p_star, double n_t) {
  return 1.0 + (1.0 / (p_star * (1.0 - p_star)) - 2.0) / (2.0 * n_t);
}

double c_multiplier(const EffectEstimate& e, const PitEstimationMode& mode) {
  const double p_star = mode.kind == PitEstimationMode::Kind::ModelBased
                            ? expit(logit(e.p_c_hat) + mode.theta_hat_overall)
                            : e.p_t_hat;
  return unconditional_multiplier(p_star, e.n_t_adj);
}

EffectEstimate estimate_effect(const Study2x2& s, const PitEstimationMode& mode) {
  if (s.x_t <= 0.0 || s.x_c <= 0.0 || s.x_t >= s.n_t || s.x_c >= s.n_c) {
    throw std::invalid_argument("estimate_effect: zero cell reached effect estimation unadjusted");
  }
  EffectEstimate e;
  e.p_t_hat = s.x_t / s.n_t;
  e.p_c_hat = s.x_c / s.n_c;
  e.n_t_adj = s.n_t;
  e.theta_hat = logit(e.p_t_hat) - logit(e.p_c_hat);
  e.v2_hat = 1.0 / (s.n_t * e.p_t_hat * (1.0 - e.p_t_hat)) +
             1.0 / (s.n_c * e.p_c_hat * (1.0 - e.p_c_hat));
  e.c_mult = c_multiplier(e, mode);
  if (!std::isfinite(e.theta_hat) || !std::isfinite(e.v2_hat)) {
    throw std::runtime_error("estimate_effect: non-finite effect estimate");
  }
  return e;
}

LorMoments exact_lor_moments(int n_t, int n_c, double p_t, double p_c) {
  if (n_t < 1 || n_c < 1 || !(p_t > 0.0 && p_t < 1.0) || !(p_c > 0.0 && p_c < 1.0)) {
    throw std::invalid_argument("exact_lor_moments: need n >= 1 and p in (0,1)");
  }
  std::vector<double> pmf_t(n_t + 1), pmf_c(n_c + 1);
  std::vector<double> lor_t(n_t + 1), lor_c(n_c + 1);
  for (int k = 0; k <= n_t; ++k) {
    pmf_t[k] = binomial_pmf(k, n_t, p_t);
    lor_t[k] = logit((k + 0.5) / (n_t + 1.0));
  }
  for (int k = 0; k <= n_c; ++k) {
    pmf_c[k] = binomial_pmf(k, n_c, p_c);
    lor_c[k] = logit((k + 0.5) / (n_c + 1.0));
  }
  double mean = 0.0;
  double second = 0.0;
  for (int a = 0; a <= n_t; ++a) {
    for (int b = 0; b <= n_c; ++b) {
      const double w = pmf_t[a] * pmf_c[b];
      const double theta = lor_t[a] - lor_c[b];
      mean += w * theta;
      second += w * theta * theta;
    }
  }
  return {mean, second - mean * mean};
}

}  // namespace hetvar
