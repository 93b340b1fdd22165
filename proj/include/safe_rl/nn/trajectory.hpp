#pragma once

#include <vector>

#include <Eigen/Core>

namespace safe_rl::nn {

struct Step {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  Eigen::VectorXd next_obs;
  double cost = 0.0;
  double constraint_cost = 0.0;
  double log_prob = 0.0;  // under the behavior policy
  bool terminal = false;  // true when the episode really ended (no bootstrap)
};

enum class Signal { kCost, kConstraint };

// Episodes stored back to back.
struct TrajectoryBatch {
  std::vector<Step> steps;
  std::vector<int> episode_lengths;

  void add_episode(std::vector<Step> episode);
  int n_episodes() const { return static_cast<int>(episode_lengths.size()); }
  int n_steps() const { return static_cast<int>(steps.size()); }
  int episode_begin(int e) const;

  // Lengths sum to the step count; only the last step of an episode may be terminal.
  void validate() const;

  double signal(int t, Signal which) const {
    return which == Signal::kCost ? steps[t].cost : steps[t].constraint_cost;
  }
  Eigen::MatrixXd observations() const;
  Eigen::MatrixXd next_observations() const;
  Eigen::MatrixXd actions() const;
};

// Sum_t gamma^t signal_t per episode.
Eigen::VectorXd discounted_returns(const TrajectoryBatch& batch, Signal which, double gamma);

// Per-step discounted return-to-go within its episode.
Eigen::VectorXd returns_to_go(const TrajectoryBatch& batch, Signal which, double gamma);

// GAE with delta_t = s_t + gamma V_{t+1} - V_t. The value after an episode's
// last step is 0, unless `bootstrap` (one entry per episode) is given and the
// step is not terminal.
Eigen::VectorXd gae_advantages(const TrajectoryBatch& batch, Signal which, const Eigen::VectorXd& values,
                               double gamma, double lambda, const Eigen::VectorXd* bootstrap = nullptr);

}  // namespace safe_rl::nn
