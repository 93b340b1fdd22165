#pragma once

#include <cmath>

#include <Eigen/Core>

#include "safe_rl/common/error.hpp"

namespace safe_rl::nn {

enum class OptimizerKind { kAdam, kSgd };

// First-order minimizer over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
            double eps = 1e-8)
      : kind_(kind), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
    require(learning_rate >= 0.0, ErrorCode::kInvalidArgument, "learning rate must be nonnegative");
  }

  // params <- params - step(grad)
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    require_same_size(params.size(), grad.size(), "optimizer gradient");
    if (kind_ == OptimizerKind::kSgd) {
      params -= lr_ * grad;
      return;
    }
    if (m_.size() != params.size()) {
      m_ = Eigen::VectorXd::Zero(params.size());
      v_ = Eigen::VectorXd::Zero(params.size());
      t_ = 0;
    }
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  int t_ = 0;
};

}  // namespace safe_rl::nn
