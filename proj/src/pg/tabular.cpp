#include "safe_rl/pg/tabular.hpp"

#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/cmdp/exact_gradient.hpp"
#include "safe_rl/common/error.hpp"

namespace safe_rl::pg {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd logits_from_params(const Eigen::VectorXd& params, int n_states, int n_actions) {
  require_same_size(params.size(), static_cast<long>(n_states) * n_actions, "tabular parameters");
  return Eigen::Map<const RowMajor>(params.data(), n_states, n_actions);
}

Eigen::VectorXd params_from_logits(const Eigen::MatrixXd& logits) {
  const RowMajor r = logits;
  return Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
}

Eigen::VectorXd exact_tabular_gradient(const cmdp::TabularCmdp& cmdp, const Eigen::VectorXd& params,
                                       cmdp::CostKind which) {
  const Eigen::MatrixXd logits = logits_from_params(params, cmdp.n_states, cmdp.n_actions);
  return params_from_logits(cmdp::exact_softmax_gradient(cmdp, logits, cmdp::cost_matrix(cmdp, which)));
}

Eigen::MatrixXd exact_tabular_fisher(const cmdp::TabularCmdp& cmdp, const Eigen::VectorXd& params) {
  const Eigen::MatrixXd logits = logits_from_params(params, cmdp.n_states, cmdp.n_actions);
  const cmdp::TabularPolicy pi = cmdp::softmax_policy(logits);
  const Eigen::VectorXd mu = cmdp::discounted_visitation(cmdp, pi);
  const int m = cmdp.n_actions;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(params.size(), params.size());
  for (int x = 0; x < cmdp.n_states; ++x) {
    const Eigen::VectorXd p = pi.probs.row(x).transpose();
    f.block(x * m, x * m, m, m) = mu[x] * (Eigen::MatrixXd(p.asDiagonal()) - p * p.transpose());
  }
  return f;
}

}  // namespace safe_rl::pg
