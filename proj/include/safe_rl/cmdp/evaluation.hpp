#pragma once

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace safe_rl::cmdp {

// T_{pi,h}[V](x) = sum_a pi(a|x) [h(x,a) + gamma sum_x' P(x'|x,a) V(x')].
Eigen::VectorXd bellman_apply(const TabularCmdp& cmdp, const TabularPolicy& policy,
                              const Eigen::MatrixXd& h, const Eigen::VectorXd& value);

// Exact fixed point of T_{pi,h} via a dense LU solve of (I - gamma P_pi) V = h_pi.
Eigen::VectorXd policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy,
                                const Eigen::MatrixXd& h);
Eigen::VectorXd policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy,
                                CostKind which);

// Q_h(x,a) = h(x,a) + gamma sum_x' P(x'|x,a) V(x').
Eigen::MatrixXd action_values(const TabularCmdp& cmdp, const Eigen::MatrixXd& h,
                              const Eigen::VectorXd& value);

// Expected discounted visit counts E[sum_t gamma^t 1{x_t = x} | x0, pi]; sums to 1/(1-gamma).
Eigen::VectorXd state_occupancy(const TabularCmdp& cmdp, const TabularPolicy& policy);

// gamma-visiting distribution (1 - gamma) * state_occupancy; sums to 1.
Eigen::VectorXd discounted_visitation(const TabularCmdp& cmdp, const TabularPolicy& policy);

}  // namespace safe_rl::cmdp
