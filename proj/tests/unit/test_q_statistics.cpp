#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hetvar/meta_sample.hpp"

using namespace hetvar;
using hetvar::testing::random_sample;
using hetvar::testing::synthetic_sample;

TEST_CASE("weight schemes") {
  SUBCASE("ESS weights are the stored effective sample sizes") {
    std::vector<Study2x2> tables;
    for (int i = 0; i < 3; ++i) tables.push_back({3, 10, 4, 10});
    const MetaSample s = make_meta_sample(tables, AdjustmentPolicy::OnlyIfZero);
    const Eigen::ArrayXd w = weights(s, WeightScheme::ess());
    for (int i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(5.0));
  }
  SUBCASE("the skewed size set gives n over four") {
    // totals 12,16,18,20,84 with equal arms
    const std::vector<int> totals = {12, 16, 18, 20, 84};
    const std::vector<double> expected = {3.0, 4.0, 4.5, 5.0, 21.0};
    for (std::size_t i = 0; i < totals.size(); ++i) {
      const double half = totals[i] / 2.0;
      CHECK(effective_sample_size({1, half, 1, half}) == doctest::Approx(expected[i]));
    }
  }
  SUBCASE("inverse-variance weights") {
    const MetaSample s = synthetic_sample({0.0, 1.0}, {0.5, 0.25}, {1.0, 1.0});
    const Eigen::ArrayXd w = weights(s, WeightScheme::inverse_variance());
    CHECK(w[0] == doctest::Approx(2.0));
    CHECK(w[1] == doctest::Approx(4.0));
  }
  SUBCASE("tau-augmented weights") {
    const MetaSample s = synthetic_sample({0.0, 1.0}, {0.5, 0.25}, {1.0, 1.0});
    const Eigen::ArrayXd w = weights(s, WeightScheme::inverse_variance_plus_tau(0.5));
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(1.0 / 0.75));
    CHECK_THROWS(WeightScheme::inverse_variance_plus_tau(-0.1));
  }
}

TEST_CASE("weighted mean") {
  const MetaSample s = synthetic_sample({0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
  Eigen::ArrayXd w(2);
  w << 1.0, 1.0;
  CHECK(weighted_mean(s, w) == doctest::Approx(0.5));
  w << 2.0, 4.0;
  CHECK(weighted_mean(s, w) == doctest::Approx(2.0 / 3.0));
  w << 1e6, 1.0;
  CHECK(std::fabs(weighted_mean(s, w) - 0.0) < 1e-5);
}

TEST_CASE("q statistic") {
  SUBCASE("zero iff all effects equal") {
    const MetaSample s = synthetic_sample({0.7, 0.7, 0.7}, {1.0, 1.0, 1.0}, {1.0, 2.0, 3.0});
    CHECK(q_statistic(s, s.ess) == doctest::Approx(0.0));
  }
  SUBCASE("two studies, unit weights") {
    const MetaSample s = synthetic_sample({0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
    CHECK(q_statistic(s, s.ess) == doctest::Approx(0.5));
  }
  SUBCASE("hand-computed three-study value") {
    // w = {1,2,3}, theta = {0,1,2}: mean 4/3, Q = 16/9 + 2/9 + 12/9 = 10/3
    const MetaSample s = synthetic_sample({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}, {1.0, 2.0, 3.0});
    CHECK(q_statistic(s, s.ess) == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("two-pass Q equals the expanded form for any offset") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const MetaSample s = random_sample(rng);
    const Eigen::ArrayXd w = s.ess;
    const double q_two_pass = q_statistic(s, w);

    const double offset = 3.0 * rng.normal();
    const double W = w.sum();
    const Eigen::ArrayXd q = w / W;
    const Eigen::ArrayXd big_theta = s.thetas() - offset;
    double diag = (q * (1.0 - q) * big_theta.square()).sum();
    double cross = 0.0;
    for (int i = 0; i < s.size(); ++i) {
      for (int j = 0; j < s.size(); ++j) {
        if (i != j) cross += q[i] * q[j] * big_theta[i] * big_theta[j];
      }
    }
    const double q_expanded = W * (diag - cross);
    CHECK(q_two_pass == doctest::Approx(q_expanded).epsilon(1e-12));
  }
}

TEST_CASE("Q with scaled weights: mean invariant, Q scales linearly") {
  Rng rng(17);
  const MetaSample s = random_sample(rng);
  const double c = 3.7;
  CHECK(weighted_mean(s, s.ess) == doctest::Approx(weighted_mean(s, (c * s.ess).eval())));
  CHECK(q_statistic(s, (c * s.ess).eval()) == doctest::Approx(c * q_statistic(s, s.ess)));
}

TEST_CASE("generalized Q decreases strictly in tau2 for heterogeneous effects") {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const MetaSample s = random_sample(rng);
    double prev = generalized_q(s, 0.0);
    for (double tau2 : {0.1, 0.5, 1.0, 2.0}) {
      const double cur = generalized_q(s, tau2);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("expected Q_F") {
  SUBCASE("tau2 = 0 reduces to the conditional moment") {
    const MetaSample s = synthetic_sample({0.0, 1.0, 0.5}, {0.5, 0.8, 1.1}, {2.0, 3.0, 4.0});
    const Eigen::ArrayXd w = s.ess;
    const double W = w.sum();
    const Eigen::ArrayXd q = w / W;
    const double expected = W * (q * (1.0 - q) * s.variances()).sum();
    CHECK(expected_qf(s, 0.0, PitEstimationMode::naive()) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("two studies with C = 1.2 and tau2 = 1 give 2.2") {
    // p_t = 0.5, n_t = 5 makes the naive C exactly 1.2
    const MetaSample s = synthetic_sample({0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
    CHECK(expected_qf(s, 1.0, PitEstimationMode::naive()) == doctest::Approx(2.2).epsilon(1e-14));
  }
  SUBCASE("strictly increasing in tau2") {
    Rng rng(23);
    const MetaSample s = random_sample(rng);
    double prev = expected_qf(s, 0.0, PitEstimationMode::naive());
    for (double tau2 : {0.2, 0.7, 1.5}) {
      const double cur = expected_qf(s, tau2, PitEstimationMode::naive());
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("ess_weighted_lor matches the weighted mean with ESS weights") {
  Rng rng(29);
  const MetaSample s = random_sample(rng);
  CHECK(ess_weighted_lor(s) == doctest::Approx(weighted_mean(s, s.ess)));
}
