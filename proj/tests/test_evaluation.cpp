#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/common/error.hpp"

using namespace safe_rl;
using namespace safe_rl::cmdp;

TEST_CASE("bellman_apply on a one-state self loop") {
  const TabularCmdp m = fixtures::one_state(Eigen::RowVectorXd::Ones(1), 0.0, 0.5, 1.0);
  const TabularPolicy pi = TabularPolicy::uniform(1, 1);
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
  CHECK(bellman_apply(m, pi, h, Eigen::VectorXd::Zero(1))(0) == doctest::Approx(1.0));
  CHECK(bellman_apply(m, pi, h, Eigen::VectorXd::Constant(1, 2.0))(0) == doctest::Approx(2.0));
}

TEST_CASE("bellman_apply matches the dense matrix form h_pi + gamma P_pi V") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const TabularCmdp m = random_cmdp(3, 2, 0.9, rng);
    const TabularPolicy pi = random_policy(3, 2, rng);
    const Eigen::VectorXd v = gaussian_vector(rng, 3);
    // Oracle: assemble P_pi and h_pi entry by entry.
    Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(3, 3);
    Eigen::VectorXd h_pi = Eigen::VectorXd::Zero(3);
    for (int x = 0; x < 3; ++x) {
      for (int a = 0; a < 2; ++a) {
        h_pi(x) += pi.probs(x, a) * m.cost(x, a);
        for (int y = 0; y < 3; ++y) p_pi(x, y) += pi.probs(x, a) * m.transition(x * 2 + a, y);
      }
    }
    const Eigen::VectorXd expected = h_pi + m.gamma * p_pi * v;
    CHECK((bellman_apply(m, pi, m.cost, v) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("bellman_apply rejects mismatched dimensions") {
  const TabularCmdp m = fixtures::one_state(Eigen::RowVectorXd::Ones(2), 0.0, 0.5, 1.0);
  const TabularPolicy pi = TabularPolicy::uniform(1, 2);
  try {
    bellman_apply(m, pi, m.cost, Eigen::VectorXd::Zero(3));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  CHECK_THROWS_AS(bellman_apply(m, TabularPolicy::uniform(2, 2), m.cost, Eigen::VectorXd::Zero(1)),
                  Error);
}

TEST_CASE("policy_evaluate closed forms") {
  SUBCASE("geometric series") {
    const TabularCmdp m = fixtures::one_state(Eigen::RowVector2d(0.3, 0.7), 1.0, 0.9, 100.0);
    Rng rng(1);
    const Eigen::VectorXd d = policy_evaluate(m, random_policy(1, 2, rng), CostKind::kConstraint);
    CHECK(d(0) == doctest::Approx(10.0).epsilon(1e-14));
  }
  SUBCASE("zero cost gives zero value") {
    Rng rng(2);
    TabularCmdp m = random_cmdp(4, 2, 0.8, rng);
    m.cost.setZero();
    CHECK(policy_evaluate(m, random_policy(4, 2, rng), CostKind::kCost).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("policy_evaluate matches a value-iteration oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const TabularCmdp m = random_cmdp(4, 2, 0.9, rng);
    const TabularPolicy pi = random_policy(4, 2, rng);
    for (CostKind which : {CostKind::kCost, CostKind::kConstraint}) {
      const Eigen::MatrixXd h = cost_matrix(m, which);
      const Eigen::VectorXd exact = policy_evaluate(m, pi, which);
      const Eigen::VectorXd oracle = fixtures::value_iteration(m, pi, h);
      CHECK((exact - oracle).cwiseAbs().maxCoeff() < 1e-11);
      // Fixed point of the Bellman operator.
      CHECK((bellman_apply(m, pi, h, exact) - exact).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("discounted_visitation closed forms") {
  const TabularCmdp one = fixtures::one_state(Eigen::RowVectorXd::Ones(1), 1.0, 0.7, 1.0);
  CHECK(discounted_visitation(one, TabularPolicy::uniform(1, 1))(0) == doctest::Approx(1.0));

  const TabularCmdp chain = fixtures::two_state_chain(0.5);
  const Eigen::VectorXd mu = discounted_visitation(chain, TabularPolicy::uniform(2, 1));
  CHECK(mu(0) == doctest::Approx(0.5));
  CHECK(mu(1) == doctest::Approx(0.5));
}

TEST_CASE("discounted_visitation matches truncated Monte Carlo rollouts") {
  Rng rng(9);
  const TabularCmdp m = random_cmdp(4, 2, 0.8, rng);
  const TabularPolicy pi = random_policy(4, 2, rng);
  const Eigen::VectorXd mu = discounted_visitation(m, pi);
  CHECK(mu.sum() == doctest::Approx(1.0).epsilon(1e-10));

  // Each episode contributes (1 - gamma) gamma^t per visit, truncated at 120 steps.
  const int episodes = 20000;
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(episodes, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](const Eigen::RowVectorXd& p) {
    double r = u(rng), acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      acc += p(i);
      if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size() - 1);
  };
  for (int e = 0; e < episodes; ++e) {
    int x = m.x0;
    double w = 1.0 - m.gamma;
    for (int t = 0; t < 120; ++t) {
      samples(e, x) += w;
      const int a = draw(pi.probs.row(x));
      x = draw(m.transition.row(x * 2 + a));
      w *= m.gamma;
    }
  }
  for (int x = 0; x < 4; ++x) {
    const double mean = samples.col(x).mean();
    const double sd = std::sqrt((samples.col(x).array() - mean).square().sum() / (episodes - 1));
    CHECK(std::abs(mean - mu(x)) <= 3.0 * sd / std::sqrt(double(episodes)) + 1e-9);
  }
}
