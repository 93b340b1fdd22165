#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grad_check.hpp"
#include "safe_rl/common/error.hpp"
#include "safe_rl/nn/policy.hpp"

using namespace safe_rl;
using namespace safe_rl::nn;

namespace {

GaussianPolicy make_policy(bool state_dependent, int obs = 3, int act = 2) {
  return GaussianPolicy(MlpSpec::make(obs, {5, 4}, state_dependent ? 2 * act : act, Activation::kTanh,
                                      state_dependent ? OutputHead::kMeanLogVariance : OutputHead::kMean),
                        act);
}

}  // namespace

TEST_CASE("log-density at the mean with unit variance, dim 2, is -log(2 pi)") {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  CHECK(diag_gaussian_log_density<double>(z, z, z) == doctest::Approx(-std::log(2.0 * std::numbers::pi)));
}

TEST_CASE("doubling stddev at the mean lowers logp by dim log 2") {
  const GaussianPolicy pol = make_policy(false, 3, 3);
  Rng rng(1);
  Eigen::VectorXd p = pol.init(rng, 0.0).values;
  const Eigen::VectorXd x = Eigen::VectorXd::Random(3);
  const Eigen::VectorXd a = pol.mode(p, x);
  const double lp1 = pol.log_prob(p, x, a);
  p.tail(3).array() += 2.0 * std::log(2.0);  // variance x4
  CHECK(lp1 - pol.log_prob(p, x, a) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("policy log-prob matches a scalar reference at action = mean") {
  const GaussianPolicy pol = make_policy(false);
  Rng rng(2);
  ParamVector p = pol.init(rng, 0.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(3);
  CHECK(pol.log_prob(p.values, x, pol.mode(p.values, x)) ==
        doctest::Approx(-std::log(2.0 * std::numbers::pi)));
}

TEST_CASE("log-variance is clamped and stddev stays positive") {
  const GaussianPolicy pol = make_policy(false);
  Rng rng(3);
  Eigen::VectorXd p = pol.init(rng).values;
  p.tail(2) << -50.0, 50.0;
  const GaussianBatch b = pol.distribution(p, Eigen::MatrixXd::Random(3, 4));
  CHECK((b.log_var.row(0).array() == -5.0).all());
  CHECK((b.log_var.row(1).array() == 2.0).all());
  CHECK((b.stddev().array() > 0.0).all());
}

TEST_CASE("policy rejects non-finite inputs") {
  const GaussianPolicy pol = make_policy(true);
  Rng rng(4);
  const Eigen::VectorXd p = pol.init(rng).values;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(2);
  a[0] = std::nan("");
  CHECK_THROWS_AS(pol.log_prob(p, Eigen::VectorXd::Zero(3), a), Error);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  x[1] = INFINITY;
  CHECK_THROWS_AS(pol.log_prob(p, x, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("log-prob gradient matches finite differences") {
  Rng rng(5);
  for (int trial = 0; trial < 120; ++trial) {
    const GaussianPolicy pol = make_policy(trial % 2 == 0);
    const Eigen::VectorXd p = pol.init(rng, -0.5).values;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 3);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(2, 3) * 2.0;
    const Eigen::VectorXd w = Eigen::VectorXd::Random(3);
    const Eigen::VectorXd g = pol.log_prob_grad(p, x, a, w);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(p.size());
    const double fd = fixtures::directional_fd(
        [&](const Eigen::VectorXd& q) { return w.dot(pol.log_prob(q, x, a)); }, p, v);
    CHECK(fixtures::relative_error(fd, g.dot(v)) <= 1e-5);
    const Eigen::MatrixXd s = pol.scores(p, x, a);
    CHECK((s * w - g).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("closed-form KL examples") {
  const Eigen::VectorXd m = Eigen::VectorXd::Constant(1, 0.3), s = Eigen::VectorXd::Ones(1);
  CHECK(kl_diag_gaussian<double>(m, s, m, s) == 0.0);
  const Eigen::VectorXd m2 = Eigen::VectorXd::Constant(1, 1.0);
  CHECK(kl_diag_gaussian<double>(m, s, m2, s) == doctest::Approx(0.7 * 0.7 / 2.0));
  CHECK_THROWS_AS(kl_diag_gaussian<double>(m, Eigen::VectorXd::Zero(1), m, s), Error);
  const Eigen::VectorXf mf = Eigen::VectorXf::Zero(2), sf = Eigen::VectorXf::Ones(2);
  CHECK(kl_diag_gaussian<float>(mf, sf, mf, sf) == 0.0f);
}

TEST_CASE("KL is nonnegative and zero only at equality") {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::VectorXd m1 = gaussian_vector(rng, 3, 1.0), m2 = gaussian_vector(rng, 3, 1.0);
    const Eigen::VectorXd s1 = (gaussian_vector(rng, 3, 0.5)).array().exp();
    const Eigen::VectorXd s2 = (gaussian_vector(rng, 3, 0.5)).array().exp();
    CHECK(kl_diag_gaussian<double>(m1, s1, m2, s2) > 0.0);
    CHECK(kl_diag_gaussian<double>(m1, s1, m1, s1) == 0.0);
  }
}

TEST_CASE("KL matches a Monte Carlo estimate within 3 standard errors") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd m1 = gaussian_vector(rng, 2, 0.5), m2 = gaussian_vector(rng, 2, 0.5);
    const Eigen::VectorXd lv1 = gaussian_vector(rng, 2, 0.3), lv2 = gaussian_vector(rng, 2, 0.3);
    const Eigen::VectorXd s1 = (0.5 * lv1.array()).exp();
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd a = m1 + s1.cwiseProduct(gaussian_vector(rng, 2, 1.0));
      const double r = diag_gaussian_log_density<double>(m1, lv1, a) - diag_gaussian_log_density<double>(m2, lv2, a);
      sum += r;
      sum_sq += r * r;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    const double exact = kl_diag_gaussian<double>(m1, s1, m2, Eigen::VectorXd((0.5 * lv2.array()).exp()));
    CHECK(std::abs(mean - exact) <= 3.0 * se);
  }
}

TEST_CASE("mean KL between policies and its gradient") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianPolicy pol = make_policy(trial % 2 == 0);
    const Eigen::VectorXd old_p = pol.init(rng, -0.3).values;
    const Eigen::VectorXd p = old_p + 0.1 * Eigen::VectorXd::Random(old_p.size());
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 4);
    CHECK(pol.mean_kl(old_p, old_p, x) == 0.0);
    Eigen::VectorXd g;
    const double kl = pol.mean_kl(old_p, p, x, &g);
    CHECK(kl >= 0.0);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(p.size());
    const double fd = fixtures::directional_fd(
        [&](const Eigen::VectorXd& q) { return pol.mean_kl(old_p, q, x); }, p, v);
    CHECK(fixtures::relative_error(fd, g.dot(v)) <= 1e-5);
  }
}

TEST_CASE("sampling is seed-deterministic and centred on the mode") {
  const GaussianPolicy pol = make_policy(false);
  Rng init(9);
  const Eigen::VectorXd p = pol.init(init, std::log(0.25)).values;
  const Eigen::VectorXd x = Eigen::VectorXd::Random(3);
  Rng a(10), b(10);
  CHECK(pol.sample(p, x, a) == pol.sample(p, x, b));
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean += pol.sample(p, x, a) / n;
  CHECK((mean - pol.mode(p, x)).cwiseAbs().maxCoeff() <= 4.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("tabular softmax score matches finite differences") {
  const TabularSoftmaxPolicy pol(3, 4);
  const Eigen::VectorXd p = Eigen::VectorXd::Random(pol.param_count());
  CHECK(pol.probabilities(p).rowwise().sum().isOnes(1e-14));
  for (int x = 0; x < 3; ++x) {
    for (int a = 0; a < 4; ++a) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
      pol.accumulate_score(p, x, a, 1.0, g);
      const Eigen::VectorXd v = Eigen::VectorXd::Random(p.size());
      const double fd = fixtures::directional_fd(
          [&](const Eigen::VectorXd& q) { return pol.log_prob(q, x, a); }, p, v);
      CHECK(fixtures::relative_error(fd, g.dot(v)) <= 1e-5);
    }
  }
}
