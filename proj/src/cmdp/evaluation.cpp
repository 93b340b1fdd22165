#include "safe_rl/cmdp/evaluation.hpp"

#include <Eigen/LU>

#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

namespace {

Eigen::VectorXd solve_resolvent(const Eigen::MatrixXd& p_pi, double gamma,
                                const Eigen::VectorXd& rhs, bool transpose) {
  const Eigen::Index n = p_pi.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - gamma * p_pi;
  if (transpose) a.transposeInPlace();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd v = lu.solve(rhs);
  require(v.allFinite(), ErrorCode::kNumerical, "singular policy evaluation system");
  return v;
}

}  // namespace

Eigen::VectorXd bellman_apply(const TabularCmdp& cmdp, const TabularPolicy& policy,
                              const Eigen::MatrixXd& h, const Eigen::VectorXd& value) {
  check_compatible(cmdp, policy);
  require_same_size(value.size(), cmdp.n_states, "value vector");
  return policy_cost(policy, action_values(cmdp, h, value));
}

Eigen::MatrixXd action_values(const TabularCmdp& cmdp, const Eigen::MatrixXd& h,
                              const Eigen::VectorXd& value) {
  require_same_size(h.rows(), cmdp.n_states, "cost rows");
  require_same_size(h.cols(), cmdp.n_actions, "cost cols");
  require_same_size(value.size(), cmdp.n_states, "value vector");
  const Eigen::VectorXd next = cmdp.transition * value;
  Eigen::MatrixXd q = h;
  for (int x = 0; x < cmdp.n_states; ++x) {
    for (int a = 0; a < cmdp.n_actions; ++a) q(x, a) += cmdp.gamma * next(cmdp.row(x, a));
  }
  return q;
}

Eigen::VectorXd policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy,
                                const Eigen::MatrixXd& h) {
  check_compatible(cmdp, policy);
  require(cmdp.gamma < 1.0, ErrorCode::kInvalidArgument, "policy evaluation requires gamma < 1");
  return solve_resolvent(policy_transition(cmdp, policy), cmdp.gamma, policy_cost(policy, h),
                         false);
}

Eigen::VectorXd policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy,
                                CostKind which) {
  return policy_evaluate(cmdp, policy, cost_matrix(cmdp, which));
}

Eigen::VectorXd state_occupancy(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  check_compatible(cmdp, policy);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(cmdp.n_states);
  start(cmdp.x0) = 1.0;
  // Row x0 of (I - gamma P_pi)^{-1}.
  return solve_resolvent(policy_transition(cmdp, policy), cmdp.gamma, start, true);
}

Eigen::VectorXd discounted_visitation(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  return (1.0 - cmdp.gamma) * state_occupancy(cmdp, policy);
}

}  // namespace safe_rl::cmdp
