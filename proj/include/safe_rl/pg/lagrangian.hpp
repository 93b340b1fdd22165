#pragma once

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"
#include "safe_rl/envs/gridworld.hpp"
#include "safe_rl/nn/policy.hpp"

namespace safe_rl::pg {

// Multiplier with projection onto [0, lambda_max].
struct LagrangeState {
  double lambda = 0.0;
  double lambda_max = 100.0;
  double lr = 0.05;  // alpha_1

  // lambda <- clip(lambda + lr (constraint_estimate - d0), 0, lambda_max)
  void update(double constraint_estimate, double d0);
};

struct TrajectoryGradient {
  Eigen::VectorXd grad;  // (1/N) sum_j grad log P(xi_j) (C_j + lambda D_j - b)
  double mean_cost = 0.0;
  double mean_constraint = 0.0;
};

// Trajectory-likelihood-ratio estimate of grad (C + lambda D)(x0) for a tabular
// softmax policy. With use_baseline the batch mean of C + lambda D is subtracted.
TrajectoryGradient lagrangian_trajectory_gradient(envs::GridworldEnv& env, const nn::TabularSoftmaxPolicy& policy,
                                                  const Eigen::VectorXd& params, double lambda, int n_episodes,
                                                  Rng& rng, bool use_baseline = true);

// theta step along the trajectory gradient, then the multiplier step on the
// same batch; theta uses alpha_2, lambda uses state.lr.
TrajectoryGradient lagrangian_pg_update(envs::GridworldEnv& env, const nn::TabularSoftmaxPolicy& policy,
                                        Eigen::VectorXd& params, LagrangeState& state, double alpha2,
                                        int n_episodes, Rng& rng);

// Online actor-critic with a linear critic V(x) = phi(x)^T v on the
// Lagrangian cost c + lambda d. Features are one-hot states.
struct ActorCritic {
  Eigen::VectorXd v;  // critic weights
  Eigen::VectorXd w;  // NAC compatible-feature weights
  double alpha2 = 0.01;  // actor
  double alpha3 = 0.1;   // critic
  double gamma = 0.9;
  bool natural = false;

  ActorCritic(int n_states, Eigen::Index n_params, double gamma);

  // Returns the TD error delta.
  double update(const nn::TabularSoftmaxPolicy& policy, Eigen::VectorXd& params, int x, int a, double cost,
                double constraint_cost, int next_x, bool terminal, double lambda);
};

}  // namespace safe_rl::pg
