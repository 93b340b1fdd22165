#include "safe_rl/pg/critic.hpp"

#include "safe_rl/common/error.hpp"

namespace safe_rl::pg {

Critic::Critic(int input_dim, const std::vector<int>& hidden, nn::OptimizerKind kind, double lr, Rng& rng)
    : spec_(nn::MlpSpec::make(input_dim, hidden, 1, nn::Activation::kTanh, nn::OutputHead::kScalar)),
      params_(nn::init_mlp(spec_, rng, true).values),
      target_(params_),
      opt_(kind, lr) {}

Eigen::VectorXd Critic::values(const Eigen::MatrixXd& input) const {
  return nn::mlp_forward(spec_, params_, input).row(0).transpose();
}

Eigen::VectorXd Critic::target_values(const Eigen::MatrixXd& input) const {
  return nn::mlp_forward(spec_, target_, input).row(0).transpose();
}

Eigen::MatrixXd Critic::input_grad(const Eigen::MatrixXd& input) const {
  nn::MlpTape tape;
  nn::mlp_forward(spec_, params_, input, &tape);
  return nn::mlp_backward(spec_, params_, tape, Eigen::MatrixXd::Ones(1, input.cols())).input;
}

double Critic::regress(const Eigen::MatrixXd& input, const Eigen::VectorXd& targets) {
  require_same_size(input.cols(), targets.size(), "critic targets");
  require(input.cols() > 0, ErrorCode::kEmptyBuffer, "critic regression on an empty batch");
  nn::MlpTape tape;
  const Eigen::VectorXd q = nn::mlp_forward(spec_, params_, input, &tape).row(0).transpose();
  const Eigen::VectorXd err = q - targets;
  const double n = static_cast<double>(targets.size());
  const Eigen::MatrixXd grad_out = (2.0 / n) * err.transpose();
  opt_.step(params_, nn::mlp_backward(spec_, params_, tape, grad_out).params);
  return err.squaredNorm() / n;
}

void Critic::soft_update(double tau) { target_ = (1.0 - tau) * target_ + tau * params_; }

Eigen::MatrixXd stack_inputs(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) {
  require_same_size(obs.cols(), actions.cols(), "critic input batch");
  Eigen::MatrixXd x(obs.rows() + actions.rows(), obs.cols());
  x << obs, actions;
  return x;
}

}  // namespace safe_rl::pg
