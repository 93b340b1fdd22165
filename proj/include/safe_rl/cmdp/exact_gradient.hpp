#pragma once

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace safe_rl::cmdp {

// Row-wise softmax of a |X| x |A| logit table.
TabularPolicy softmax_policy(const Eigen::MatrixXd& logits);

// Exact gradient of V_h(x0) with respect to the logits of a tabular softmax
// policy, from the policy gradient theorem evaluated with exact linear
// algebra: dV/dlogit(x,b) = occ(x) pi(b|x) (Q_h(x,b) - V_h(x)).
Eigen::MatrixXd exact_softmax_gradient(const TabularCmdp& cmdp, const Eigen::MatrixXd& logits,
                                       const Eigen::MatrixXd& h);

}  // namespace safe_rl::cmdp
