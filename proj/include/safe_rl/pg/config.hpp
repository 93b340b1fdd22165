#pragma once

#include <string>
#include <vector>

#include "safe_rl/nn/optimizer.hpp"

namespace safe_rl::pg {

enum class Family { kDdpg, kPpo };
enum class SafetyMode { kNone, kLagrangian, kThetaProjection, kActionProjection };

struct Algorithm {
  Family family = Family::kDdpg;
  SafetyMode safety = SafetyMode::kNone;
};

// Registered ids: ddpg, ddpg_lagrangian, sddpg, sddpg_aproj, ppo,
// ppo_lagrangian, sppo, sppo_aproj.
Algorithm parse_algorithm(const std::string& id);
std::string algorithm_id(const Algorithm& a);
const std::vector<std::string>& algorithm_ids();

struct SafePgConfig {
  double gamma = 0.99;

  // Networks
  std::vector<int> actor_hidden{100, 50};
  std::vector<int> critic_hidden{200, 50};
  nn::OptimizerKind optimizer = nn::OptimizerKind::kAdam;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double initial_log_var = -1.0;  // PPO family

  // DDPG family
  int batch_size = 64;
  int updates_per_iteration = 20;
  int replay_capacity = 100000;
  double tau = 0.01;  // target smoothing
  double exploration_std = 0.2;

  // PPO family
  double step_size = 1.0;  // alpha in -(alpha / beta) H^-1 g
  double beta = 1.0;       // KL penalty weight, adapted each iteration (PPO)
  bool adaptive_beta = true;
  double kl_target = 0.01;
  double gae_lambda = 0.95;
  int critic_epochs = 10;
  double fisher_damping = 1e-2;
  int cg_iterations = 50;

  // Lagrangian
  double lambda_init = 0.0;
  double lambda_lr = 0.05;
  double lambda_max = 100.0;

  // Lyapunov variants
  double tightening = 0.0;           // delta in d0 (1 - delta)
  double safeguard_margin = 0.05;
  double safeguard_multiplier = 10.0;  // alpha_sg = multiplier * base rate
  double projection_k = 1.0;
  double std_floor = 1e-3;

  void validate() const;
};

}  // namespace safe_rl::pg
