#pragma once

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace safe_rl::cmdp {

// Lyapunov function L induced by a baseline policy and an auxiliary
// constraint cost epsilon, together with the plain constraint values.
//   L(x)     = E[sum_t gamma^t (d(x_t) + eps(x_t)) | pi_B, x]
//   QL(x,a)  = d(x) + eps(x) + gamma sum_x' P(x'|x,a) L(x')
//   W, QW    = the same with eps = 0
struct LyapunovBundle {
  Eigen::VectorXd epsilon;
  Eigen::VectorXd L;
  Eigen::MatrixXd QL;
  Eigen::VectorXd W;
  Eigen::MatrixXd QW;
};

// Largest constant auxiliary cost: (1 - gamma)(d0 - D_B(x0)).
// Throws kInfeasibleBaseline when D_B(x0) > d0.
double epsilon_constant(const TabularCmdp& cmdp, const TabularPolicy& baseline);

// Maximizer of the budget LP: all slack placed on the least-visited state
// (lowest index on ties). States the baseline never reaches are excluded,
// since any budget placed there is free and the LP is unbounded.
Eigen::VectorXd epsilon_state_dependent(const TabularCmdp& cmdp, const TabularPolicy& baseline);

// (d0 - D_B(x0)) - occupancy^T eps. Nonnegative iff eps satisfies the budget
// constraint of the auxiliary-cost LP.
double epsilon_budget_residual(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               const Eigen::VectorXd& epsilon);

// Per-state 2 D_max TV(pi_a(.|x), pi_b(.|x)) / (1 - gamma). Diagnostic only.
Eigen::VectorXd epsilon_star_bound(const TabularCmdp& cmdp, const TabularPolicy& pi_a,
                                   const TabularPolicy& pi_b);

LyapunovBundle lyapunov_bundle(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               const Eigen::VectorXd& epsilon);
LyapunovBundle lyapunov_bundle(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               double epsilon);

}  // namespace safe_rl::cmdp
