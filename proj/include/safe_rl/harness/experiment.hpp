#pragma once

#include <memory>
#include <string>
#include <vector>

#include "safe_rl/harness/experiment_config.hpp"
#include "safe_rl/harness/metrics.hpp"
#include "safe_rl/pg/agent.hpp"

namespace safe_rl::harness {

struct RunResult {
  std::string metrics_path;
  std::string traces_path;
  std::string checkpoint_path;
  std::vector<MetricsRow> rows;
  std::vector<TraceRow> traces;
};

// Validates, then trains for config.iterations iterations. After each one the
// noise-free policy is evaluated on a fixed seed set drawn from the "eval"
// stream, which never overlaps the agent's "train" stream. Writes
// metrics.csv, traces.csv, config.json and checkpoint.json to output_dir.
RunResult run_experiment(const ExperimentConfig& config);

// Seed of the evaluation episode set for a master seed.
std::uint64_t evaluation_seed(std::uint64_t master_seed);

// Noise-free evaluation of an agent: (mean return, mean constraint return,
// violation fraction) over n episodes.
pg::ReturnSummary evaluate_agent(const pg::Agent& agent, envs::Env& env, int n_episodes, std::uint64_t seed,
                                 double gamma);

struct LoadedRun {
  ExperimentConfig config;
  std::unique_ptr<envs::Env> env;
  std::unique_ptr<pg::Agent> agent;
  int iterations_completed = 0;
};

// Rebuilds the environment and agent stored in a checkpoint written by run_experiment.
LoadedRun load_run(const std::string& checkpoint_path);

}  // namespace safe_rl::harness
