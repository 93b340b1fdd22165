#pragma once

#include <Eigen/Core>

#include "safe_rl/envs/gridworld.hpp"
#include "safe_rl/nn/optimizer.hpp"
#include "safe_rl/nn/policy.hpp"
#include "safe_rl/nn/trajectory.hpp"
#include "safe_rl/pg/agent.hpp"
#include "safe_rl/pg/critic.hpp"
#include "safe_rl/pg/lagrangian.hpp"
#include "safe_rl/pg/projection.hpp"

namespace safe_rl::pg {

// Per-step weights (1 - gamma) / N * gamma^t, t counted within each episode.
Eigen::VectorXd discount_weights(const nn::TrajectoryBatch& batch, double gamma);

// Adaptive KL penalty: doubled above 2 * target, halved below target / 2.
double adapt_beta(double beta, double measured_kl, double kl_target);

// Sampled gradient (1 - gamma)/N sum_j sum_t gamma^t A_t grad log pi(a_t|x_t)
// for a tabular softmax policy, with GAE advantages computed from the given
// per-state values (exact values make the estimate unbiased).
Eigen::VectorXd tabular_ppo_gradient(envs::GridworldEnv& env, const nn::TabularSoftmaxPolicy& policy,
                                     const Eigen::VectorXd& params, const Eigen::VectorXd& state_values,
                                     nn::Signal which, double gae_lambda, int n_episodes, Rng& rng);

class PpoAgent final : public Agent {
 public:
  PpoAgent(SafetyMode mode, const SafePgConfig& config, int obs_dim, int action_dim, double d0, std::uint64_t seed);

  IterationStats iterate(envs::Env& env, int iteration, int episodes) override;
  Eigen::VectorXd act(const Eigen::VectorXd& obs) const override;
  const Eigen::VectorXd& actor_params() const override { return theta_; }
  nn::ParamVector parameters() const override;
  void load(const nn::ParamVector& params, const AgentScalars& scalars) override;
  AgentScalars scalars() const override;

  const nn::GaussianPolicy& policy() const { return policy_; }
  double beta() const { return beta_; }

  // The policy update on a collected batch; exposed for tests.
  IterationStats update(const nn::TrajectoryBatch& batch, double d0_measure);

 private:
  struct Behavior {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
    ProjectionResult projection;  // only for a-projection with a baseline
    Eigen::VectorXd g;
  };
  Behavior behavior(const Eigen::VectorXd& obs) const;
  Eigen::MatrixXd score_columns(const nn::TrajectoryBatch& batch) const;

  SafetyMode mode_;
  SafePgConfig cfg_;
  int obs_dim_;
  int action_dim_;
  double d0_eff_;
  SeedTree seeds_;
  Rng init_rng_;
  Rng sample_rng_;
  nn::GaussianPolicy policy_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd theta_baseline_;
  bool has_baseline_ = false;
  double epsilon_ = 0.0;
  double beta_;
  Critic v_;
  Critic w_;
  Critic qw_;  // state-action constraint critic for the safety layer
  LagrangeState lagrange_;
};

}  // namespace safe_rl::pg
