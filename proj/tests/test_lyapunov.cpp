#include <doctest.h>

#include "fixtures.hpp"
#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/cmdp/linear_program.hpp"
#include "safe_rl/cmdp/lyapunov.hpp"
#include "safe_rl/common/error.hpp"

using namespace safe_rl;
using namespace safe_rl::cmdp;

namespace {

// D = 1 / (1 - 0.9) = 10 for every policy.
TabularCmdp ten_cmdp(double d0) {
  return fixtures::one_state(Eigen::RowVector2d(0.5, 1.0), 1.0, 0.9, d0);
}

}  // namespace

TEST_CASE("epsilon_constant closed forms") {
  const TabularPolicy pi = TabularPolicy::uniform(1, 2);
  CHECK(epsilon_constant(ten_cmdp(12.0), pi) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(epsilon_constant(ten_cmdp(10.0), pi) == doctest::Approx(0.0).epsilon(1e-12));
  try {
    epsilon_constant(ten_cmdp(9.0), pi);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleBaseline);
  }
  const TabularCmdp unconstrained = ten_cmdp(std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(epsilon_constant(unconstrained, pi), Error);
}

TEST_CASE("epsilon_state_dependent closed forms") {
  const TabularPolicy pi = TabularPolicy::uniform(1, 2);
  const Eigen::VectorXd eps = epsilon_state_dependent(ten_cmdp(12.0), pi);
  REQUIRE(eps.size() == 1);
  CHECK(eps(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(epsilon_state_dependent(ten_cmdp(10.0), pi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(epsilon_state_dependent(ten_cmdp(9.0), pi), Error);
}

TEST_CASE("both auxiliary costs satisfy the budget LP on random instances") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [m, pi] = random_feasible_instance(5, 3, 0.9, rng);
    const double eps_c = epsilon_constant(m, pi);
    const Eigen::VectorXd eps_const = Eigen::VectorXd::Constant(5, eps_c);
    const Eigen::VectorXd eps_sd = epsilon_state_dependent(m, pi);

    CHECK(eps_c >= 0.0);
    CHECK((eps_sd.array() >= 0.0).all());
    // The budget holds with equality for both closed forms.
    CHECK(std::abs(epsilon_budget_residual(m, pi, eps_const)) < 1e-9);
    CHECK(std::abs(epsilon_budget_residual(m, pi, eps_sd)) < 1e-9);
    CHECK(eps_sd.sum() >= eps_const.sum() - 1e-12);
    CHECK((eps_sd.array() > 0.0).count() == 1);

    // The one-hot form is the LP maximizer: compare with a numeric solve of
    // max 1^T eps s.t. occ^T eps <= slack, eps >= 0.
    const Eigen::VectorXd occ = state_occupancy(m, pi);
    const double slack = m.d0 - policy_evaluate(m, pi, CostKind::kConstraint)(m.x0);
    LinearProgram lp;
    lp.objective = -Eigen::VectorXd::Ones(5);
    lp.a_eq.resize(0, 5);
    lp.b_eq.resize(0);
    lp.a_ub = occ.transpose();
    lp.b_ub = Eigen::VectorXd::Constant(1, slack);
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(eps_sd.sum() == doctest::Approx(-sol.value).epsilon(1e-9));
  }
}

TEST_CASE("least-visited state ties resolve to the lowest index") {
  // Two absorbing states reached with equal probability from x0 = 0.
  TabularCmdp m;
  m.n_states = 3;
  m.n_actions = 1;
  m.transition.resize(3, 3);
  m.transition << 0, 0.5, 0.5, 0, 1, 0, 0, 0, 1;
  m.cost = Eigen::MatrixXd::Zero(3, 1);
  m.constraint_cost = Eigen::VectorXd::Zero(3);
  m.gamma = 0.5;
  m.d0 = 1.0;
  const Eigen::VectorXd eps = epsilon_state_dependent(m, TabularPolicy::uniform(3, 1));
  // occupancy: x0 -> 1, x1, x2 -> 0.5 each; tie between 1 and 2 goes to 1.
  CHECK(eps(1) == doctest::Approx(2.0));
  CHECK(eps(0) == 0.0);
  CHECK(eps(2) == 0.0);
}

TEST_CASE("epsilon_star_bound") {
  Rng rng(4);
  TabularCmdp m = random_cmdp(3, 2, 0.5, rng);
  m.constraint_cost << 1.0, 0.25, 0.5;  // D_max = 1

  const TabularPolicy a = TabularPolicy::deterministic({0, 1, 0}, 2);
  CHECK(epsilon_star_bound(m, a, a).cwiseAbs().maxCoeff() == 0.0);

  const TabularPolicy b = TabularPolicy::deterministic({0, 0, 0}, 2);
  const Eigen::VectorXd bound = epsilon_star_bound(m, a, b);
  CHECK(bound(0) == 0.0);
  CHECK(bound(1) == doctest::Approx(4.0));
  CHECK(bound(2) == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const TabularPolicy p = random_policy(3, 2, rng), q = random_policy(3, 2, rng);
    const Eigen::VectorXd got = epsilon_star_bound(m, p, q);
    for (int x = 0; x < 3; ++x) {
      double l1 = 0.0;
      for (int u = 0; u < 2; ++u) l1 += std::abs(p.probs(x, u) - q.probs(x, u));
      CHECK(got(x) == doctest::Approx(2.0 * 1.0 * 0.5 * l1 / 0.5));
    }
  }
}

TEST_CASE("lyapunov_bundle closed forms") {
  Rng rng(8);
  const auto [m, pi] = random_feasible_instance(4, 3, 0.9, rng);

  SUBCASE("zero auxiliary cost reproduces the constraint value") {
    const LyapunovBundle b = lyapunov_bundle(m, pi, 0.0);
    CHECK((b.L - policy_evaluate(m, pi, CostKind::kConstraint)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b.L - b.W).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b.QL - b.QW).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("d = 0 and constant k gives k / (1 - gamma)") {
    TabularCmdp z = m;
    z.constraint_cost.setZero();
    const LyapunovBundle b = lyapunov_bundle(z, pi, 0.3);
    CHECK((b.L.array() - 3.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("negative auxiliary cost is rejected") {
    CHECK_THROWS_AS(lyapunov_bundle(m, pi, -0.1), Error);
  }
}

TEST_CASE("lyapunov_bundle yields a Lyapunov function for both constructions") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [m, pi] = random_feasible_instance(5, 3, 0.9, rng);
    for (const Eigen::VectorXd& eps :
         {Eigen::VectorXd(Eigen::VectorXd::Constant(5, epsilon_constant(m, pi))),
          epsilon_state_dependent(m, pi)}) {
      const LyapunovBundle b = lyapunov_bundle(m, pi, eps);
      const Eigen::MatrixXd d = cost_matrix(m, CostKind::kConstraint);
      // Fixed point under pi_B with the augmented cost.
      const Eigen::VectorXd fixed = bellman_apply(m, pi, d + eps.replicate(1, 3), b.L);
      CHECK((fixed - b.L).cwiseAbs().maxCoeff() < 1e-10);
      // T_{pi_B, d}[L] <= L and L(x0) <= d0.
      CHECK(((bellman_apply(m, pi, d, b.L) - b.L).array() <= 1e-12).all());
      CHECK(b.L(m.x0) <= m.d0 + 1e-9);
    }
  }
}
