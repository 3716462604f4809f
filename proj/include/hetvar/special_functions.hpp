#pragma once

namespace hetvar {

double logit(double p);
double expit(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, Lentz continued fraction otherwise;
/// absolute accuracy near machine precision.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with (possibly non-integer) df > 0.
double chi_square_cdf(double x, double df);

/// Chi-square quantile, |F(result) - p| driven below 1e-12 by Newton
/// steps with bisection safeguard.
double chi_square_quantile(double p, double df);

/// log of the binomial coefficient C(n, k).
double log_choose(int n, int k);

/// Binomial pmf via exp(log terms); stable for n up to a few thousand.
double binomial_pmf(int k, int n, double p);

}  // namespace hetvar
