#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hetvar/quadform.hpp"
#include "hetvar/special_functions.hpp"

using namespace hetvar;
using hetvar::testing::random_sample;
using hetvar::testing::synthetic_sample;

TEST_CASE("unit weights and unit variances give a chi-square with K-1 df") {
  const int k = 6;
  const MetaSample s = synthetic_sample(std::vector<double>(k, 0.0), std::vector<double>(k, 1.0),
                                        std::vector<double>(k, 1.0));
  const QuadFormSpec spec = build_spec(s, s.ess, 0.0, VarianceLaw::conditional());
  REQUIRE(spec.lambdas.size() == k - 1);
  for (int i = 0; i < k - 1; ++i) CHECK(spec.lambdas[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quadform_cdf(spec, chi_square_quantile(0.95, k - 1)) ==
        doctest::Approx(0.95).epsilon(1e-9));
}

TEST_CASE("chi-square quantile checks for one and two eigenweights") {
  QuadFormSpec spec;
  spec.lambdas = Eigen::ArrayXd::Ones(1);
  CHECK(quadform_cdf(spec, 3.841458820694124) == doctest::Approx(0.95).epsilon(1e-9));
  spec.lambdas = Eigen::ArrayXd::Ones(2);
  CHECK(quadform_cdf(spec, 5.991464547107979) == doctest::Approx(0.95).epsilon(1e-9));
}

TEST_CASE("two studies leave a single eigenweight (a + b) / 2") {
  const MetaSample s = synthetic_sample({0.0, 1.0}, {0.7, 0.2}, {1.0, 1.0});
  const QuadFormSpec spec = build_spec(s, s.ess, 0.0, VarianceLaw::conditional());
  REQUIRE(spec.lambdas.size() == 1);
  CHECK(spec.lambdas[0] == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("eigenweight sum matches the trace identity on random samples") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const MetaSample s = random_sample(rng);
    const double tau2 = 2.0 * rng.uniform();
    const Eigen::ArrayXd w = s.ess;
    const QuadFormSpec spec = build_spec(s, w, tau2, VarianceLaw::conditional());
    const Eigen::ArrayXd s2 = s.variances() + tau2;
    const double trace = (w * s2).sum() - (w.square() * s2).sum() / w.sum();
    CHECK(spec.lambdas.sum() == doctest::Approx(trace).epsilon(1e-10));
    CHECK(spec.lambdas.size() <= s.size() - 1);
    CHECK(spec.lambdas.minCoeff() > 0.0);
  }
}

TEST_CASE("cdf is monotone in q and anchored at the endpoints") {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const MetaSample s = random_sample(rng);
    const QuadFormSpec spec = build_spec(s, s.ess, rng.uniform(), VarianceLaw::conditional());
    CHECK(quadform_cdf(spec, 0.0) == 0.0);
    const double scale = spec.lambdas.sum();
    double prev = 0.0;
    for (int i = 1; i <= 12; ++i) {
      const double cur = quadform_cdf(spec, scale * i / 4.0);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
    CHECK(quadform_cdf(spec, 60.0 * scale) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("cdf matches a Monte Carlo oracle on random specs") {
  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const MetaSample s = random_sample(rng, 3, 10);
    const QuadFormSpec spec = build_spec(s, s.ess, rng.uniform(), VarianceLaw::conditional());
    const double q = spec.lambdas.sum() * (0.5 + 1.5 * rng.uniform());

    const int draws = 100000;
    Rng mc(1000 + trial);
    int below = 0;
    for (int d = 0; d < draws; ++d) {
      double acc = 0.0;
      for (int j = 0; j < spec.lambdas.size(); ++j) {
        const double z = mc.normal();
        acc += spec.lambdas[j] * z * z;
      }
      if (acc <= q) ++below;
    }
    const double mc_est = static_cast<double>(below) / draws;
    CHECK(std::fabs(quadform_cdf(spec, q) - mc_est) < 0.012);
  }
}

TEST_CASE("cdf matches nested-quadrature references for mixed eigenweights") {
  // frozen from machine-precision conditioning integrals computed
  // independently of the series method
  const auto ruben = [](std::initializer_list<double> l, double q) {
    QuadFormSpec spec;
    spec.lambdas.resize(static_cast<Eigen::Index>(l.size()));
    Eigen::Index i = 0;
    for (double v : l) spec.lambdas[i++] = v;
    spec.accuracy = 1e-12;
    return quadform_cdf(spec, q);
  };
  CHECK(ruben({2.0, 1.0}, 5.0) == doctest::Approx(0.8135749190785062).epsilon(1e-11));
  CHECK(ruben({0.05, 0.03}, 0.2) == doctest::Approx(0.9162312997190429).epsilon(1e-11));
  CHECK(ruben({7.3, 0.4}, 11.0) == doctest::Approx(0.7713545707690777).epsilon(1e-11));
  CHECK(ruben({2.0, 1.0, 0.5}, 5.0) == doctest::Approx(0.7735682085340762).epsilon(1e-11));
  CHECK(ruben({10.0, 3.0, 1.0}, 20.0) == doctest::Approx(0.7766343379477555).epsilon(1e-11));
}

TEST_CASE("cdf error paths") {
  QuadFormSpec spec;
  spec.lambdas = Eigen::ArrayXd::Ones(2);
  CHECK_THROWS_AS(quadform_cdf(spec, -1.0), std::invalid_argument);
  spec.lambdas.resize(0);
  CHECK_THROWS_AS(quadform_cdf(spec, 1.0), std::invalid_argument);
}

TEST_CASE("a pathological eigenweight spread raises instead of lying") {
  QuadFormSpec spec;
  spec.lambdas.resize(2);
  spec.lambdas << 1e9, 1.0;
  CHECK_THROWS_AS(quadform_cdf(spec, 5e8), QuadFormError);
}

TEST_CASE("profile cdf is nonincreasing in tau2 at fixed q") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const MetaSample s = random_sample(rng);
    const double q_obs = q_statistic(s, s.ess);
    for (const VarianceLaw law :
         {VarianceLaw::conditional(), VarianceLaw::unconditional_naive()}) {
      double prev = 2.0;
      for (int i = 0; i <= 20; ++i) {
        const double tau2 = 0.25 * i;
        const double f = quadform_cdf(build_spec(s, s.ess, tau2, law), q_obs);
        CHECK(f <= prev + 1e-9);
        prev = f;
      }
    }
  }
}

TEST_CASE("profile_root round-trips a known tau2") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const MetaSample s = random_sample(rng);
    const double q_obs = q_statistic(s, s.ess);
    const double target = quadform_cdf(build_spec(s, s.ess, 0.3, VarianceLaw::conditional()), q_obs);
    if (target <= 0.01 || target >= 0.99) continue;
    const ProfileRootResult root =
        profile_root(s, s.ess, VarianceLaw::conditional(), q_obs, target);
    REQUIRE(root.found());
    CHECK(root.tau2 == doctest::Approx(0.3).epsilon(1e-6));
  }
}

TEST_CASE("profile_root matches the K = 2 closed form") {
  const MetaSample s = synthetic_sample({0.0, 2.0}, {0.4, 0.6}, {1.0, 1.0});
  const double q_obs = q_statistic(s, s.ess);  // single lambda (s1^2 + s2^2)/2
  const double target = 0.4;
  const double quantile = chi_square_quantile(target, 1.0);
  // (v1 + tau2 + v2 + tau2)/2 = q_obs / quantile
  const double expected = (q_obs / quantile - 0.5 * (0.4 + 0.6));
  REQUIRE(expected > 0.0);
  const ProfileRootResult root = profile_root(s, s.ess, VarianceLaw::conditional(), q_obs, target,
                                              5.0, 1000.0);
  REQUIRE(root.found());
  CHECK(root.tau2 == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("profile_root reports a negative-side root as BelowZero") {
  const MetaSample s = synthetic_sample({0.0, 0.01, 0.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
  const double q_obs = q_statistic(s, s.ess);  // essentially zero
  const ProfileRootResult root = profile_root(s, s.ess, VarianceLaw::conditional(), q_obs, 0.5);
  CHECK(root.status == ProfileRootResult::Status::BelowZero);
}

TEST_CASE("profile_root reports roots beyond the cap as AboveCap") {
  // gigantic Q: the cdf stays above 0.5 for every tau2 below the cap
  const MetaSample s = synthetic_sample({0.0, 50.0, -50.0}, {0.1, 0.1, 0.1}, {1.0, 1.0, 1.0});
  const double q_obs = q_statistic(s, s.ess);
  const ProfileRootResult root =
      profile_root(s, s.ess, VarianceLaw::conditional(), q_obs, 0.5, 5.0, 100.0);
  CHECK(root.status == ProfileRootResult::Status::AboveCap);
  CHECK(root.tau2 == 100.0);
}

TEST_CASE("build_spec validates inputs") {
  const MetaSample s = synthetic_sample({0.0, 1.0}, {0.5, 0.5}, {1.0, 1.0});
  CHECK_THROWS(build_spec(s, s.ess, -0.5, VarianceLaw::conditional()));
}
