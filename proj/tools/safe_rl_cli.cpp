#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance_main.hpp"
#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/cmdp/lp_oracle.hpp"
#include "safe_rl/cmdp/spi.hpp"
#include "safe_rl/harness/experiment.hpp"

using namespace safe_rl;
using nlohmann::json;

namespace {

json policy_json(const cmdp::TabularPolicy& p) { return json::parse(cmdp::to_json(p, -1)); }

int run(const std::string& config_path, const std::optional<std::uint64_t>& seed, const std::string& out) {
  harness::ExperimentConfig config = harness::load_experiment_config(config_path);
  if (seed) config.seed = *seed;
  if (!out.empty()) config.output_dir = out;
  const harness::RunResult r = harness::run_experiment(config);
  std::cout << r.metrics_path << "\n";
  return 0;
}

int eval(const std::string& checkpoint, int episodes, const std::optional<std::uint64_t>& seed) {
  harness::LoadedRun run = harness::load_run(checkpoint);
  const int n = episodes > 0 ? episodes : run.config.eval_episodes;
  const std::uint64_t s = seed ? *seed : harness::evaluation_seed(run.config.seed);
  const pg::ReturnSummary e = harness::evaluate_agent(*run.agent, *run.env, n, s, run.config.agent.gamma);
  const json out = {{"algorithm", run.config.algorithm},
                    {"env_id", run.config.env_id},
                    {"iterations_completed", run.iterations_completed},
                    {"episodes", n},
                    {"mean_return", e.mean_return},
                    {"mean_constraint_return", e.mean_constraint_return},
                    {"violation_fraction", e.violation_fraction}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int solve(const std::string& cmdp_path, const std::string& policy_path, int max_iters) {
  const cmdp::TabularCmdp m = cmdp::load_cmdp(cmdp_path);
  json out;
  const cmdp::CmdpLpResult lp = cmdp::lp_optimal_cmdp(m);
  out["lp"] = {{"value", lp.value}, {"policy", policy_json(lp.policy)}};
  const cmdp::TabularPolicy initial = policy_path.empty()
                                          ? cmdp::TabularPolicy::uniform(m.n_states, m.n_actions)
                                          : cmdp::policy_from_json(read_text_file(policy_path));
  const double d_init = cmdp::policy_evaluate(m, initial, cmdp::CostKind::kConstraint)[m.x0];
  if (m.constrained() && d_init > m.d0) {
    out["spi"] = {{"skipped", "initial policy violates d0"}, {"initial_constraint", d_init}};
  } else {
    const cmdp::SpiResult spi = cmdp::spi_run(m, initial, max_iters, 1e-12);
    json log = json::array();
    for (const cmdp::SpiIterate& it : spi.log) {
      log.push_back({{"iteration", it.iteration}, {"cost", it.cost}, {"constraint", it.constraint}});
    }
    out["spi"] = {{"converged", spi.converged}, {"policy", policy_json(spi.policy)}, {"log", log},
                  {"gap_to_lp", spi.log.back().cost - lp.value}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-based safe policy optimization"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "train one experiment and write metrics");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "override the master seed");
  run_cmd->add_option("--out", out_dir, "override the output directory");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved checkpoint with the noise-free policy");
  std::string checkpoint;
  int episodes = 0;
  std::optional<std::uint64_t> eval_seed;
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint.json from a run")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", episodes, "episodes (default: the run's eval_episodes)");
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed (default: the run's evaluation set)");

  auto* accept_cmd = app.add_subcommand("accept", "run the acceptance suite");
  harness::AcceptanceOptions options;
  std::string report;
  accept_cmd->add_option("--only", options.only, "criterion ids to run (default: all)");
  accept_cmd->add_option("--out", options.output_dir, "directory for experiment traces");
  accept_cmd->add_option("--report", report, "write the JSON report here");
  accept_cmd->add_option("--gather-iterations", options.gather_iterations, "iterations per Point-Gather run");
  accept_cmd->add_option("--gather-seeds", options.gather_seeds, "seeds per algorithm on Point-Gather");

  auto* solve_cmd = app.add_subcommand("solve-cmdp", "exact LP optimum and SPI on a tabular CMDP");
  std::string cmdp_path, policy_path;
  int max_iters = 200;
  solve_cmd->add_option("--cmdp", cmdp_path, "tabular CMDP (JSON)")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--policy", policy_path, "feasible initial policy for SPI (default: uniform)");
  solve_cmd->add_option("--max-iters", max_iters, "SPI iteration cap");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(config_path, seed, out_dir);
    if (*eval_cmd) return eval(checkpoint, episodes, eval_seed);
    if (*accept_cmd) return tools::run_acceptance_cli(options, report);
    if (*solve_cmd) return solve(cmdp_path, policy_path, max_iters);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
