#pragma once

#include <cstdint>
#include <string>

#include "safe_rl/envs/env.hpp"
#include "safe_rl/pg/config.hpp"

namespace safe_rl::harness {

struct ExperimentConfig {
  std::string env_id = "point_gather";
  envs::EnvConfig env = envs::default_env_config("point_gather");
  std::string algorithm = "sddpg_aproj";
  pg::SafePgConfig agent;
  int iterations = 300;
  int episodes_per_iteration = 10;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  bool record_wall_clock = false;  // off by default so runs stay byte-reproducible

  // Throws kInvalidConfig; touches nothing on disk.
  void validate() const;
};

// Defaults for a registered environment and algorithm.
ExperimentConfig default_experiment_config(const std::string& env_id, const std::string& algorithm);

// JSON document with "env", "agent" and top-level run fields. Missing keys
// keep their defaults; unknown keys are rejected so typos do not go unnoticed.
std::string to_json(const ExperimentConfig& config, int indent = 2);
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const ExperimentConfig& config, const std::string& path);

}  // namespace safe_rl::harness
