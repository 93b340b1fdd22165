#pragma once

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace safe_rl::pg {

// TabularSoftmaxPolicy parameters are logits stored row-major by state.
Eigen::MatrixXd logits_from_params(const Eigen::VectorXd& params, int n_states, int n_actions);
Eigen::VectorXd params_from_logits(const Eigen::MatrixXd& logits);

// Exact gradient of V_h(x0) in the flat parameter layout.
Eigen::VectorXd exact_tabular_gradient(const cmdp::TabularCmdp& cmdp, const Eigen::VectorXd& params,
                                       cmdp::CostKind which);

// Exact Fisher matrix of the softmax policy under the gamma-visiting
// distribution: sum_x mu(x) (diag(pi_x) - pi_x pi_x^T), block diagonal.
Eigen::MatrixXd exact_tabular_fisher(const cmdp::TabularCmdp& cmdp, const Eigen::VectorXd& params);

}  // namespace safe_rl::pg
