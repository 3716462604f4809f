#pragma once

#include <vector>

#include "hetvar/meta_sample.hpp"
#include "hetvar/rng.hpp"
#include "hetvar/special_functions.hpp"

namespace hetvar::testing {

/// Sample with explicit effects and weights. p-hats and arm sizes are
/// seeded so the naive C values are well-defined (p_t = 0.5, n_t = 5
/// gives C = 1.2 unless overridden).
inline MetaSample synthetic_sample(const std::vector<double>& thetas,
                                   const std::vector<double>& v2s,
                                   const std::vector<double>& ess,
                                   const std::vector<double>& p_t = {},
                                   const std::vector<double>& n_t = {}) {
  MetaSample s;
  const int k = static_cast<int>(thetas.size());
  s.ess.resize(k);
  for (int i = 0; i < k; ++i) {
    EffectEstimate e;
    e.theta_hat = thetas[i];
    e.v2_hat = v2s[i];
    e.p_t_hat = p_t.empty() ? 0.5 : p_t[i];
    e.p_c_hat = 0.4;
    e.n_t_adj = n_t.empty() ? 5.0 : n_t[i];
    e.c_mult = unconditional_multiplier(e.p_t_hat, e.n_t_adj);
    s.studies.push_back(e);
    s.ess[i] = ess[i];
  }
  return s;
}

/// Random sample satisfying the MetaSample invariants; spreads chosen
/// so estimator profiles stay well-conditioned.
inline MetaSample random_sample(Rng& rng, int k_min = 3, int k_max = 10) {
  const int k = k_min + static_cast<int>(rng.uniform() * (k_max - k_min + 0.999));
  std::vector<double> thetas(k), v2s(k), ess(k), p_t(k), n_t(k);
  for (int i = 0; i < k; ++i) {
    thetas[i] = 2.0 * rng.normal();
    v2s[i] = 0.05 + 1.5 * rng.uniform();
    ess[i] = 2.0 + 28.0 * rng.uniform();
    p_t[i] = 0.1 + 0.8 * rng.uniform();
    n_t[i] = 10.0 + 90.0 * rng.uniform();
  }
  return synthetic_sample(thetas, v2s, ess, p_t, n_t);
}

/// Random study tables through the real generation path.
inline std::vector<Study2x2> random_tables(Rng& rng, int k, int n_per_arm, double p_c,
                                           double theta, double tau) {
  std::vector<Study2x2> tables;
  while (static_cast<int>(tables.size()) < k) {
    const double theta_i = theta + tau * rng.normal();
    Study2x2 s;
    s.n_t = n_per_arm;
    s.n_c = n_per_arm;
    s.x_c = rng.binomial(n_per_arm, p_c);
    s.x_t = rng.binomial(n_per_arm, expit(logit(p_c) + theta_i));
    if (is_double_zero(s) || is_double_n(s)) continue;
    tables.push_back(s);
  }
  return tables;
}

}  // namespace hetvar::testing
