#include "safe_rl/cmdp/lyapunov.hpp"

#include <cmath>
#include <string>

#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

namespace {

// d0 - D_B(x0), after the feasibility check.
double constraint_slack(const TabularCmdp& cmdp, const TabularPolicy& baseline) {
  require(cmdp.constrained(), ErrorCode::kInvalidArgument,
          "auxiliary cost needs a finite threshold d0");
  const double d = policy_evaluate(cmdp, baseline, CostKind::kConstraint)(cmdp.x0);
  const double slack = cmdp.d0 - d;
  // Round-off allowance only; genuine violations fail fast.
  if (slack < -1e-12 * (1.0 + std::abs(cmdp.d0))) {
    throw Error(ErrorCode::kInfeasibleBaseline,
                "baseline constraint value " + std::to_string(d) + " exceeds d0 = " +
                    std::to_string(cmdp.d0));
  }
  return std::max(slack, 0.0);
}

}  // namespace

double epsilon_constant(const TabularCmdp& cmdp, const TabularPolicy& baseline) {
  return (1.0 - cmdp.gamma) * constraint_slack(cmdp, baseline);
}

Eigen::VectorXd epsilon_state_dependent(const TabularCmdp& cmdp, const TabularPolicy& baseline) {
  const double slack = constraint_slack(cmdp, baseline);
  const Eigen::VectorXd occupancy = state_occupancy(cmdp, baseline);
  int least = -1;
  for (int x = 0; x < cmdp.n_states; ++x) {
    if (occupancy(x) <= 1e-12) continue;
    if (least < 0 || occupancy(x) < occupancy(least)) least = x;
  }
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(cmdp.n_states);
  eps(least) = slack / occupancy(least);
  return eps;
}

double epsilon_budget_residual(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               const Eigen::VectorXd& epsilon) {
  require_same_size(epsilon.size(), cmdp.n_states, "epsilon");
  const double d = policy_evaluate(cmdp, baseline, CostKind::kConstraint)(cmdp.x0);
  return (cmdp.d0 - d) - state_occupancy(cmdp, baseline).dot(epsilon);
}

Eigen::VectorXd epsilon_star_bound(const TabularCmdp& cmdp, const TabularPolicy& pi_a,
                                   const TabularPolicy& pi_b) {
  check_compatible(cmdp, pi_a);
  check_compatible(cmdp, pi_b);
  const Eigen::VectorXd tv = 0.5 * (pi_a.probs - pi_b.probs).cwiseAbs().rowwise().sum();
  return 2.0 * cmdp.d_max() * tv / (1.0 - cmdp.gamma);
}

LyapunovBundle lyapunov_bundle(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               const Eigen::VectorXd& epsilon) {
  require_same_size(epsilon.size(), cmdp.n_states, "epsilon");
  require((epsilon.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "auxiliary cost must be nonnegative");
  const Eigen::MatrixXd d = cost_matrix(cmdp, CostKind::kConstraint);
  const Eigen::MatrixXd d_aux = d + epsilon.replicate(1, cmdp.n_actions);

  LyapunovBundle b;
  b.epsilon = epsilon;
  b.L = policy_evaluate(cmdp, baseline, d_aux);
  b.QL = action_values(cmdp, d_aux, b.L);
  b.W = policy_evaluate(cmdp, baseline, d);
  b.QW = action_values(cmdp, d, b.W);
  return b;
}

LyapunovBundle lyapunov_bundle(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               double epsilon) {
  return lyapunov_bundle(cmdp, baseline, Eigen::VectorXd::Constant(cmdp.n_states, epsilon));
}

}  // namespace safe_rl::cmdp
