#pragma once

#include <functional>

#include <Eigen/Core>

#include "safe_rl/nn/mlp.hpp"
#include "safe_rl/nn/optimizer.hpp"
#include "safe_rl/pg/agent.hpp"
#include "safe_rl/pg/critic.hpp"
#include "safe_rl/pg/lagrangian.hpp"
#include "safe_rl/pg/projection.hpp"
#include "safe_rl/pg/replay_buffer.hpp"

namespace safe_rl::pg {

// Per-column dQ/da at (obs, actions).
using ActionGradFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions)>;

ActionGradFn critic_action_grad(const Critic& critic);

// y = s + gamma * (1 - terminal) * Q'(x', a') using the critic's target copy.
Eigen::VectorXd bellman_targets(const Critic& critic, const Eigen::VectorXd& signal,
                                const Eigen::VectorXd& not_terminal, const Eigen::MatrixXd& next_obs,
                                const Eigen::MatrixXd& next_actions, double gamma);

// Gradient of mean_i Q(x_i, mu_theta(x_i)) w.r.t. theta by the chain rule.
Eigen::VectorXd deterministic_actor_grad(const nn::MlpSpec& actor, const Eigen::VectorXd& theta,
                                         const Eigen::MatrixXd& obs, const ActionGradFn& dq_da);

// Gradient of mean_i Q(x_i, proj_i(mu_theta(x_i))) where proj_i is the safety
// layer with fixed g_L (column i of g), baseline action and epsilon.
Eigen::VectorXd a_projection_actor_grad(const nn::MlpSpec& actor, const Eigen::VectorXd& theta,
                                        const Eigen::MatrixXd& obs, const ActionGradFn& dq_da,
                                        const Eigen::MatrixXd& g, const Eigen::MatrixXd& baseline_actions,
                                        double epsilon);

// Applies the safety layer column by column.
Eigen::MatrixXd project_actions(const Eigen::MatrixXd& actions, const Eigen::MatrixXd& baseline_actions,
                                const Eigen::MatrixXd& g, double epsilon);

// Columns c with (1/n) sum c c^T = mean_x J_mu(x)^T J_mu(x) / sigma^2: the
// Fisher matrix of N(mu_theta(x), sigma^2 I).
Eigen::MatrixXd deterministic_fisher_columns(const nn::MlpSpec& actor, const Eigen::VectorXd& theta,
                                             const Eigen::MatrixXd& obs, double sigma);

class DdpgAgent final : public Agent {
 public:
  DdpgAgent(SafetyMode mode, const SafePgConfig& config, int obs_dim, int action_dim, double d0,
            std::uint64_t seed);

  IterationStats iterate(envs::Env& env, int iteration, int episodes) override;
  Eigen::VectorXd act(const Eigen::VectorXd& obs) const override;
  const Eigen::VectorXd& actor_params() const override { return theta_; }
  nn::ParamVector parameters() const override;
  void load(const nn::ParamVector& params, const AgentScalars& scalars) override;
  AgentScalars scalars() const override;

  const Critic& qv() const { return qv_; }
  const Critic& qw() const { return qw_; }
  const ReplayBuffer& replay() const { return replay_; }

  // One critic + actor update on a replay minibatch; exposed for tests.
  void update_step(bool safeguard, double epsilon, IterationStats& stats);

 private:
  Eigen::MatrixXd policy_actions(const Eigen::MatrixXd& obs) const;

  SafetyMode mode_;
  SafePgConfig cfg_;
  int obs_dim_;
  int action_dim_;
  double d0_eff_;
  SeedTree seeds_;
  Rng init_rng_;
  Rng explore_rng_;
  Rng replay_rng_;
  nn::MlpSpec actor_spec_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd theta_target_;
  Eigen::VectorXd theta_baseline_;
  bool has_baseline_ = false;
  double epsilon_ = 0.0;
  Critic qv_;
  Critic qw_;
  ReplayBuffer replay_;
  nn::Optimizer actor_opt_;
  LagrangeState lagrange_;
};

}  // namespace safe_rl::pg
