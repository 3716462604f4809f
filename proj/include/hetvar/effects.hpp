#pragma once

#include "hetvar/study.hpp"

namespace hetvar {

/// How p_iT enters the unconditional-variance multiplier C_i: either
/// through the model alpha_i + theta (needs an overall LOR estimate) or
/// through the study's own adjusted p_hat_T.
struct PitEstimationMode {
  enum class Kind { ModelBased, Naive };
  Kind kind = Kind::Naive;
  double theta_hat_overall = 0.0;  ///< meaningful only when ModelBased

  static PitEstimationMode naive() { return {}; }
  static PitEstimationMode model_based(double theta_hat_overall);
};

/// Per-study LOR estimate, its estimated conditional variance, and the
/// multiplier C_i that inflates tau^2 in the unconditional variance.
struct EffectEstimate {
  double theta_hat = 0.0;
  double v2_hat = 0.0;
  double c_mult = 1.0;
  double p_t_hat = 0.0;
  double p_c_hat = 0.0;
  double n_t_adj = 0.0;  ///< adjusted treatment arm size, kept so C_i can be re-derived per mode
};

/// C = 1 + ([p (1-p)]^-1 - 2) / (2 n_t); >= 1 for p in (0,1).
double unconditional_multiplier(double p_star, double n_t);

/// Re-derives C_i for an existing estimate under a different mode.
double c_multiplier(const EffectEstimate& e, const PitEstimationMode& mode);

/// LOR, delta-method variance and C_i from an adjusted table. All four
/// cells of `s` must be strictly inside (0, n).
EffectEstimate estimate_effect(const Study2x2& s, const PitEstimationMode& mode);

struct LorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and central second moment of the half-corrected LOR
/// estimate under two independent binomials, by enumeration of the full
/// (X_T, X_C) support. The correction is applied to every outcome so
/// all terms are finite. Test oracle for small-sample bias.
LorMoments exact_lor_moments(int n_t, int n_c, double p_t, double p_c);

}  // namespace hetvar
