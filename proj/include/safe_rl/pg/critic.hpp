#pragma once

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"
#include "safe_rl/nn/mlp.hpp"
#include "safe_rl/nn/optimizer.hpp"

namespace safe_rl::pg {

// Scalar MLP critic with a Polyak-averaged target copy. Input is either the
// state (V, W) or the stacked [state; action] (Q_V, Q_W). The output layer
// starts at zero.
class Critic {
 public:
  Critic(int input_dim, const std::vector<int>& hidden, nn::OptimizerKind kind, double lr, Rng& rng);

  const nn::MlpSpec& spec() const { return spec_; }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& target_params() const { return target_; }

  Eigen::VectorXd values(const Eigen::MatrixXd& input) const;
  Eigen::VectorXd target_values(const Eigen::MatrixXd& input) const;
  // Per-column gradient of the output w.r.t. the input.
  Eigen::MatrixXd input_grad(const Eigen::MatrixXd& input) const;

  // One optimizer step on the mean squared error; returns the loss before the step.
  double regress(const Eigen::MatrixXd& input, const Eigen::VectorXd& targets);
  void soft_update(double tau);

 private:
  nn::MlpSpec spec_;
  Eigen::VectorXd params_;
  Eigen::VectorXd target_;
  nn::Optimizer opt_;
};

Eigen::MatrixXd stack_inputs(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions);

}  // namespace safe_rl::pg
