#pragma once

#include <memory>

#include "safe_rl/envs/env.hpp"

namespace safe_rl::envs {

// Wraps an environment and zeroes its cost and/or constraint signals.
class MaskedEnv final : public Env {
 public:
  MaskedEnv(std::unique_ptr<Env> inner, bool zero_cost, bool zero_constraint)
      : inner_(std::move(inner)), zero_cost_(zero_cost), zero_constraint_(zero_constraint) {}

  std::string name() const override { return inner_->name(); }
  int obs_dim() const override { return inner_->obs_dim(); }
  int action_dim() const override { return inner_->action_dim(); }
  const EnvConfig& config() const override { return inner_->config(); }
  Eigen::VectorXd reset(std::uint64_t seed) override { return inner_->reset(seed); }
  StepResult step(const Eigen::VectorXd& action) override {
    StepResult r = inner_->step(action);
    if (zero_cost_) r.cost = 0.0;
    if (zero_constraint_) r.constraint_cost = 0.0;
    return r;
  }
  bool done() const override { return inner_->done(); }
  std::unique_ptr<Env> clone() const override {
    return std::make_unique<MaskedEnv>(inner_->clone(), zero_cost_, zero_constraint_);
  }

 private:
  std::unique_ptr<Env> inner_;
  bool zero_cost_;
  bool zero_constraint_;
};

}  // namespace safe_rl::envs
