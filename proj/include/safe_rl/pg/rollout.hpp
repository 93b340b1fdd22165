#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "safe_rl/envs/env.hpp"
#include "safe_rl/nn/trajectory.hpp"

namespace safe_rl::pg {

// Maps an observation to the action handed to the environment.
using ActionFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// One episode per seed; the last step of each episode is marked terminal.
nn::TrajectoryBatch rollout(envs::Env& env, const std::vector<std::uint64_t>& seeds, const ActionFn& act);

struct ReturnSummary {
  double mean_return = 0.0;             // mean discounted cost C
  double mean_constraint_return = 0.0;  // mean discounted constraint cost D
  double violation_fraction = 0.0;      // episodes with D > d0
  Eigen::VectorXd returns;
  Eigen::VectorXd constraint_returns;
};

ReturnSummary summarize(const nn::TrajectoryBatch& batch, double gamma, double d0);

// Noise-free evaluation on seeds derived from `seed` under the "eval" stream.
ReturnSummary evaluate_policy(envs::Env& env, const ActionFn& deterministic_policy, int n_episodes,
                              std::uint64_t seed, double gamma);

}  // namespace safe_rl::pg
