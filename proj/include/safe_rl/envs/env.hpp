#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

namespace safe_rl::envs {

struct EnvConfig {
  int horizon = 15;
  double d0 = 2.0;
  double dt = 0.1;
  double noise_std = 0.1;     // observation and action noise
  double action_scale = 1.0;  // acceleration per unit action
  double max_speed = 1e9;
};

struct StepResult {
  Eigen::VectorXd observation;
  double cost = 0.0;
  double constraint_cost = 0.0;
  bool done = false;
};

// Continuous-action episodic environment. Actions outside [-1, 1]^n are
// clamped; the caller's (unclamped) action is what policies score.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::string name() const = 0;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual const EnvConfig& config() const = 0;

  // Fully determines the episode together with the action sequence.
  virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Eigen::VectorXd& action) = 0;
  virtual bool done() const = 0;

  virtual std::unique_ptr<Env> clone() const = 0;
};

std::unique_ptr<Env> make_env(const std::string& id, const EnvConfig& config);
EnvConfig default_env_config(const std::string& id);

}  // namespace safe_rl::envs
