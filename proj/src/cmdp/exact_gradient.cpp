#include "safe_rl/cmdp/exact_gradient.hpp"

#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

TabularPolicy softmax_policy(const Eigen::MatrixXd& logits) {
  TabularPolicy p{logits};
  for (Eigen::Index x = 0; x < logits.rows(); ++x) {
    p.probs.row(x) = (logits.row(x).array() - logits.row(x).maxCoeff()).exp();
    p.probs.row(x) /= p.probs.row(x).sum();
  }
  return p;
}

Eigen::MatrixXd exact_softmax_gradient(const TabularCmdp& cmdp, const Eigen::MatrixXd& logits,
                                       const Eigen::MatrixXd& h) {
  require_same_size(logits.rows(), cmdp.n_states, "logit rows");
  require_same_size(logits.cols(), cmdp.n_actions, "logit cols");
  const TabularPolicy pi = softmax_policy(logits);
  const Eigen::VectorXd v = policy_evaluate(cmdp, pi, h);
  const Eigen::MatrixXd q = action_values(cmdp, h, v);
  const Eigen::VectorXd occ = state_occupancy(cmdp, pi);
  Eigen::MatrixXd grad(cmdp.n_states, cmdp.n_actions);
  for (int x = 0; x < cmdp.n_states; ++x) {
    grad.row(x) = occ(x) * pi.probs.row(x).cwiseProduct(q.row(x).array().matrix() -
                                                        Eigen::RowVectorXd::Constant(cmdp.n_actions, v(x)));
  }
  return grad;
}

}  // namespace safe_rl::cmdp
