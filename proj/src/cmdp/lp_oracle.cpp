#include "safe_rl/cmdp/lp_oracle.hpp"

#include "safe_rl/cmdp/linear_program.hpp"
#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

CmdpLpResult lp_optimal_cmdp(const TabularCmdp& cmdp) {
  cmdp.validate();
  const int n = cmdp.n_states;
  const int m = cmdp.n_actions;
  const double g = cmdp.gamma;

  LinearProgram lp;
  lp.objective.resize(n * m);
  lp.a_eq = Eigen::MatrixXd::Zero(n, n * m);
  lp.b_eq = Eigen::VectorXd::Zero(n);
  lp.b_eq(cmdp.x0) = 1.0 - g;
  for (int x = 0; x < n; ++x) {
    for (int a = 0; a < m; ++a) {
      const int col = static_cast<int>(cmdp.row(x, a));
      lp.objective(col) = cmdp.cost(x, a);
      lp.a_eq(x, col) += 1.0;
      lp.a_eq.col(col) -= g * cmdp.next_state_probs(x, a).transpose();
    }
  }
  if (cmdp.constrained()) {
    lp.a_ub.resize(1, n * m);
    for (int x = 0; x < n; ++x) {
      for (int a = 0; a < m; ++a) lp.a_ub(0, cmdp.row(x, a)) = cmdp.constraint_cost(x);
    }
    lp.b_ub = Eigen::VectorXd::Constant(1, (1.0 - g) * cmdp.d0);
  } else {
    lp.a_ub.resize(0, n * m);
    lp.b_ub.resize(0);
  }

  const LpSolution sol = solve_lp(lp);
  require(sol.status == LpStatus::kOptimal, ErrorCode::kInfeasible,
          "no policy satisfies the constraint threshold");

  CmdpLpResult out;
  out.value = sol.value / (1.0 - g);
  out.occupancy = Eigen::Map<const Eigen::MatrixXd>(sol.x.data(), m, n).transpose();
  out.policy.probs.resize(n, m);
  for (int x = 0; x < n; ++x) {
    const double mass = out.occupancy.row(x).sum();
    if (mass > 1e-14) {
      out.policy.probs.row(x) = out.occupancy.row(x) / mass;
    } else {
      out.policy.probs.row(x).setConstant(1.0 / m);
    }
  }
  return out;
}

}  // namespace safe_rl::cmdp
