#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/cmdp/linear_program.hpp"
#include "safe_rl/cmdp/lp_oracle.hpp"
#include "safe_rl/common/error.hpp"

using namespace safe_rl;
using namespace safe_rl::cmdp;

TEST_CASE("simplex solver on small textbook problems") {
  SUBCASE("bounded optimum") {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6  -> (4, 0), value 12.
    LinearProgram lp;
    lp.objective = Eigen::Vector2d(-3, -2);
    lp.a_eq.resize(0, 2);
    lp.b_eq.resize(0);
    lp.a_ub.resize(2, 2);
    lp.a_ub << 1, 1, 1, 3;
    lp.b_ub = Eigen::Vector2d(4, 6);
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(s.value == doctest::Approx(-12.0));
    CHECK(s.x(0) == doctest::Approx(4.0));
  }
  SUBCASE("infeasible") {
    LinearProgram lp;
    lp.objective = Eigen::Vector2d(1, 1);
    lp.a_eq = Eigen::RowVector2d(1, 1);
    lp.b_eq = Eigen::VectorXd::Constant(1, 1.0);
    lp.a_ub = Eigen::RowVector2d(1, 1);
    lp.b_ub = Eigen::VectorXd::Constant(1, 0.5);
    CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
  }
  SUBCASE("unbounded") {
    LinearProgram lp;
    lp.objective = Eigen::Vector2d(-1, 0);
    lp.a_eq.resize(0, 2);
    lp.b_eq.resize(0);
    lp.a_ub = Eigen::RowVector2d(0, 1);
    lp.b_ub = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
  }
}

TEST_CASE("unconstrained occupancy LP matches value iteration") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const TabularCmdp m = random_cmdp(5, 3, 0.9, rng);
    const CmdpLpResult r = lp_optimal_cmdp(m);
    const double vi = fixtures::optimal_value_iteration(m)(m.x0);
    CHECK(std::abs(r.value - vi) < 1e-8);
    CHECK(policy_evaluate(m, r.policy, CostKind::kCost)(m.x0) == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(r.occupancy.sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("zero threshold with everywhere-positive constraint cost is infeasible") {
  Rng rng(1);
  TabularCmdp m = random_cmdp(3, 2, 0.9, rng);
  m.constraint_cost = Eigen::VectorXd::Constant(3, 0.5);
  m.d0 = 0.0;
  try {
    lp_optimal_cmdp(m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("two-state constrained LP matches a parametric policy sweep") {
  // With one constraint, an optimal policy randomizes in at most one state,
  // so sweeping deterministic policies plus one randomized state is exhaustive.
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    TabularCmdp m = random_cmdp(2, 2, 0.8, rng);
    const TabularPolicy mid = TabularPolicy::uniform(2, 2);
    m.d0 = policy_evaluate(m, mid, CostKind::kConstraint)(m.x0);

    double best = 1e300;
    for (int x = 0; x < 2; ++x) {
      for (int other = 0; other < 2; ++other) {
        for (int k = 0; k <= 4000; ++k) {
          const double p = k / 4000.0;
          TabularPolicy pi{Eigen::MatrixXd::Zero(2, 2)};
          pi.probs(x, 0) = p;
          pi.probs(x, 1) = 1 - p;
          pi.probs(1 - x, other) = 1.0;
          if (policy_evaluate(m, pi, CostKind::kConstraint)(m.x0) <= m.d0 + 1e-12) {
            best = std::min(best, policy_evaluate(m, pi, CostKind::kCost)(m.x0));
          }
        }
      }
    }
    const CmdpLpResult r = lp_optimal_cmdp(m);
    CHECK(r.value <= best + 1e-9);
    CHECK(best - r.value < 2e-3);
    CHECK(policy_evaluate(m, r.policy, CostKind::kConstraint)(m.x0) <= m.d0 + 1e-9);
  }
}

TEST_CASE("LP optimum lower-bounds random feasible policies") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [m, pi0] = random_feasible_instance(4, 3, 0.9, rng);
    const double lp = lp_optimal_cmdp(m).value;
    for (int k = 0; k < 50; ++k) {
      const TabularPolicy pi = random_policy(4, 3, rng);
      if (policy_evaluate(m, pi, CostKind::kConstraint)(m.x0) <= m.d0) {
        CHECK(policy_evaluate(m, pi, CostKind::kCost)(m.x0) >= lp - 1e-9);
      }
    }
    CHECK(policy_evaluate(m, pi0, CostKind::kCost)(m.x0) >= lp - 1e-9);
  }
}
