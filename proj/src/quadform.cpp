#include "hetvar/quadform.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hetvar/special_functions.hpp"

namespace hetvar {

Eigen::ArrayXd marginal_variances(const MetaSample& sample, double tau2, const VarianceLaw& law) {
  switch (law.kind) {
    case VarianceLaw::Kind::Conditional:
      return sample.variances() + tau2;
    case VarianceLaw::Kind::UnconditionalModel:
      return sample.variances() + tau2 * c_multipliers(sample, resolve_model_mode(sample));
    case VarianceLaw::Kind::UnconditionalNaive:
      return sample.variances() + tau2 * c_multipliers(sample, PitEstimationMode::naive());
  }
  throw std::logic_error("marginal_variances: unknown law");
}

QuadFormSpec build_spec(const MetaSample& sample, const Eigen::ArrayXd& w, double tau2,
                        const VarianceLaw& law, double accuracy) {
  const int k = sample.size();
  if (k < 2) throw std::invalid_argument("build_spec: need K >= 2");
  if (!(tau2 >= 0.0)) throw std::invalid_argument("build_spec: tau2 must be >= 0");

  const Eigen::ArrayXd s2 = marginal_variances(sample, tau2, law);
  const double W = w.sum();

  // M = D_s A D_s = diag(w s^2) - u u' / W with u = w .* s
  const Eigen::ArrayXd s = s2.sqrt();
  const Eigen::VectorXd u = (w * s).matrix();
  Eigen::MatrixXd m = (w * s2).matrix().asDiagonal();
  m.noalias() -= u * u.transpose() / W;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw QuadFormError("build_spec: eigenvalue decomposition failed");
  }
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double lambda_max = ev.maxCoeff();
  if (!(lambda_max > 0.0)) {
    throw QuadFormError("build_spec: no positive eigenweights");
  }

  std::vector<double> kept;
  kept.reserve(k);
  for (int i = 0; i < k; ++i) {
    if (ev[i] > 1e-12 * lambda_max) kept.push_back(ev[i]);
  }
  std::sort(kept.begin(), kept.end(), std::greater<>());

  QuadFormSpec spec;
  spec.lambdas = Eigen::Map<const Eigen::ArrayXd>(kept.data(), kept.size());
  spec.accuracy = accuracy;

  const double trace = (w * s2).sum() - (w.square() * s2).sum() / W;
  if (std::fabs(spec.lambdas.sum() - trace) > 1e-10 * std::fabs(trace)) {
    throw QuadFormError("build_spec: eigenweight sum violates the trace identity");
  }
  return spec;
}

double quadform_cdf(const QuadFormSpec& spec, double q) {
  const int m = static_cast<int>(spec.lambdas.size());
  if (m == 0) throw std::invalid_argument("quadform_cdf: empty spec");
  if (!(q >= 0.0)) throw std::invalid_argument("quadform_cdf: q must be >= 0");
  if (q == 0.0) return 0.0;

  const double beta = spec.lambdas.minCoeff();
  const double y = q / beta;

  // a_0 = prod sqrt(beta / lambda_j); log-scale guard against underflow
  double log_a0 = 0.0;
  for (int j = 0; j < m; ++j) log_a0 += 0.5 * std::log(beta / spec.lambdas[j]);
  const double a0 = std::exp(log_a0);
  if (a0 < 1e-280) {
    throw QuadFormError("quadform_cdf: leading mixture coefficient underflows");
  }

  // chi-square CDF ladder: F_{m+2k}(y) = F_{m+2k-2}(y) - f, with f the
  // Poisson-gamma term advanced by one multiply per step.
  double cdf_term = chi_square_cdf(y, m);
  double f = std::exp(0.5 * m * std::log(0.5 * y) - 0.5 * y - std::lgamma(0.5 * m + 1.0));

  const Eigen::ArrayXd ratio = 1.0 - beta / spec.lambdas;
  Eigen::ArrayXd ratio_pow = Eigen::ArrayXd::Ones(m);

  constexpr int kMaxTerms = 20000;
  std::vector<double> a;
  std::vector<double> g;
  a.reserve(1024);
  g.reserve(1024);
  a.push_back(a0);

  double coeff_sum = a0;
  double total = a0 * cdf_term;

  for (int k = 1; k <= kMaxTerms; ++k) {
    if ((1.0 - coeff_sum) * std::max(cdf_term, 0.0) <= spec.accuracy) {
      return std::clamp(total, 0.0, 1.0);
    }
    ratio_pow *= ratio;
    g.push_back((ratio_pow).sum());
    double ak = 0.0;
    for (int r = 0; r < k; ++r) ak += g[k - 1 - r] * a[r];
    ak /= 2.0 * k;
    a.push_back(ak);

    cdf_term -= f;
    if (cdf_term < 0.0) cdf_term = 0.0;
    f *= (0.5 * y) / (0.5 * m + k);

    total += ak * cdf_term;
    coeff_sum += ak;
  }
  throw QuadFormError("quadform_cdf: series did not reach the requested accuracy");
}

ProfileRootResult profile_root(const MetaSample& sample, const Eigen::ArrayXd& w,
                               const VarianceLaw& law, double q_obs, double target_prob,
                               double bracket_hi, double cap) {
  if (!(target_prob > 0.0 && target_prob < 1.0)) {
    throw std::invalid_argument("profile_root: target_prob must be in (0,1)");
  }
  if (!(q_obs >= 0.0)) throw std::invalid_argument("profile_root: q_obs must be >= 0");

  const auto cdf_at = [&](double tau2) {
    return quadform_cdf(build_spec(sample, w, tau2, law), q_obs);
  };

  if (cdf_at(0.0) < target_prob) {
    return {ProfileRootResult::Status::BelowZero, 0.0};
  }

  double lo = 0.0;
  double hi = std::min(bracket_hi, cap);
  while (cdf_at(hi) >= target_prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) {
      if (cdf_at(cap) >= target_prob) {
        return {ProfileRootResult::Status::AboveCap, cap};
      }
      hi = cap;
      break;
    }
  }

  // tighter than the 1e-6 contract so round-trips through the CDF hold
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (cdf_at(mid) >= target_prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {ProfileRootResult::Status::Found, 0.5 * (lo + hi)};
}

}  // namespace hetvar
