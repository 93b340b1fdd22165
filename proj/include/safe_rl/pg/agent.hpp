#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"
#include "safe_rl/envs/env.hpp"
#include "safe_rl/nn/param_vector.hpp"
#include "safe_rl/pg/config.hpp"
#include "safe_rl/pg/rollout.hpp"

namespace safe_rl::pg {

struct IterationStats {
  ReturnSummary train;       // episodes collected this iteration
  double policy_kl = 0.0;    // KL(old || new) averaged over the iteration's states
  double lambda = 0.0;       // Lagrange multiplier or last lambda*; meaningful per algorithm
  bool has_lambda = false;
  double epsilon = 0.0;      // auxiliary constraint budget used this iteration
  bool safeguard = false;
  int cg_failures = 0;       // Fisher solves that hit the iteration cap
};

// Scalar state that travels with a checkpoint next to the parameter vector.
struct AgentScalars {
  double lambda = 0.0;
  double beta = 1.0;
  double epsilon = 0.0;
  bool has_baseline = false;
};

class Agent {
 public:
  virtual ~Agent() = default;

  // Collects `episodes` episodes with seeds from the "train" stream, then updates.
  virtual IterationStats iterate(envs::Env& env, int iteration, int episodes) = 0;
  // Noise-free action (projected for a-projection variants).
  virtual Eigen::VectorXd act(const Eigen::VectorXd& obs) const = 0;

  virtual const Eigen::VectorXd& actor_params() const = 0;
  // Everything needed to reproduce act(): actor, critics, baseline.
  virtual nn::ParamVector parameters() const = 0;
  virtual void load(const nn::ParamVector& params, const AgentScalars& scalars) = 0;
  virtual AgentScalars scalars() const = 0;
};

std::unique_ptr<Agent> make_agent(const Algorithm& algorithm, const SafePgConfig& config, int obs_dim,
                                  int action_dim, double d0, std::uint64_t seed);

}  // namespace safe_rl::pg
