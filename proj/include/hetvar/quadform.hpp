#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "hetvar/meta_sample.hpp"

namespace hetvar {

/// Which per-study variance enters the covariance of the normal vector
/// behind Q: conditional v^2 + tau^2, or unconditional v^2 + tau^2 C_i
/// with C_i's p* taken model-based or from the study's own p_hat_T.
struct VarianceLaw {
  enum class Kind { Conditional, UnconditionalModel, UnconditionalNaive };
  Kind kind = Kind::Conditional;

  static VarianceLaw conditional() { return {Kind::Conditional}; }
  static VarianceLaw unconditional_model() { return {Kind::UnconditionalModel}; }
  static VarianceLaw unconditional_naive() { return {Kind::UnconditionalNaive}; }
};

struct QuadFormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Eigenweights of Q = x'Ax, x ~ N(0, Sigma): the nonzero eigenvalues
/// of Sigma^{1/2} A Sigma^{1/2}, sorted decreasing.
struct QuadFormSpec {
  Eigen::ArrayXd lambdas;
  double accuracy = 1e-8;
};

/// Per-study marginal variances v^2 + tau2 (conditional) or
/// v^2 + tau2 * C_i (unconditional) under the law.
Eigen::ArrayXd marginal_variances(const MetaSample& sample, double tau2, const VarianceLaw& law);

/// Eigenweights of the centered quadratic form with weight vector w and
/// the law's variances at tau2. A = diag(w) - w w'/W annihilates the
/// constant vector, so at most K-1 eigenweights survive; eigenvalues
/// below 1e-12 * max are dropped as numerical zeros. The eigenweight sum
/// is validated against the trace identity
///   sum w_i s_i^2 - (sum w_i^2 s_i^2) / W
/// to relative 1e-10.
QuadFormSpec build_spec(const MetaSample& sample, const Eigen::ArrayXd& w, double tau2,
                        const VarianceLaw& law, double accuracy = 1e-8);

/// P(sum lambda_j Z_j^2 <= q), absolute error <= spec.accuracy.
/// Mixture-of-chi-squares series with beta = lambda_min, whose
/// nonnegative coefficients sum to one and give a computable bound on
/// the truncation error. Throws QuadFormError if the bound is not met
/// within the term budget.
double quadform_cdf(const QuadFormSpec& spec, double q);

struct ProfileRootResult {
  enum class Status { Found, BelowZero, AboveCap };
  Status status = Status::Found;
  double tau2 = 0.0;

  bool found() const { return status == Status::Found; }
};

/// Solves F(q_obs | tau2) = target_prob for tau2 >= 0. F is
/// nonincreasing in tau2, so the root is unique when it exists.
/// BelowZero: F(q_obs | 0) < target_prob (caller truncates to 0).
/// AboveCap: no root with tau2 <= cap after doubling the bracket.
ProfileRootResult profile_root(const MetaSample& sample, const Eigen::ArrayXd& w,
                               const VarianceLaw& law, double q_obs, double target_prob,
                               double bracket_hi = 5.0, double cap = 100.0);

}  // namespace hetvar
