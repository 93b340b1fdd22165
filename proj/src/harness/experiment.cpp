#include "safe_rl/harness/experiment.hpp"

#include <chrono>
#include <filesystem>

#include <json.hpp>

#include "safe_rl/common/error.hpp"
#include "safe_rl/common/io.hpp"
#include "safe_rl/common/rng.hpp"

namespace safe_rl::harness {

using nlohmann::json;

namespace {

std::string checkpoint_metadata(const ExperimentConfig& config, const pg::AgentScalars& s, int iterations) {
  const json meta = {{"config", json::parse(to_json(config))},
                     {"iterations_completed", iterations},
                     {"scalars",
                      {{"lambda", s.lambda}, {"beta", s.beta}, {"epsilon", s.epsilon},
                       {"has_baseline", s.has_baseline}}}};
  return meta.dump();
}

void add_traces(std::vector<TraceRow>& out, int it, const pg::IterationStats& s, const pg::ReturnSummary& eval) {
  out.push_back({it, "train_return", s.train.mean_return});
  out.push_back({it, "train_constraint_return", s.train.mean_constraint_return});
  out.push_back({it, "eval_return", eval.mean_return});
  out.push_back({it, "eval_constraint_return", eval.mean_constraint_return});
  out.push_back({it, "eval_violation_fraction", eval.violation_fraction});
  out.push_back({it, "policy_kl", s.policy_kl});
  if (s.has_lambda) out.push_back({it, "lambda", s.lambda});
  out.push_back({it, "epsilon", s.epsilon});
  out.push_back({it, "safeguard", s.safeguard ? 1.0 : 0.0});
  out.push_back({it, "cg_failures", static_cast<double>(s.cg_failures)});
}

}  // namespace

std::uint64_t evaluation_seed(std::uint64_t master_seed) { return SeedTree(master_seed).seed("eval"); }

pg::ReturnSummary evaluate_agent(const pg::Agent& agent, envs::Env& env, int n_episodes, std::uint64_t seed,
                                 double gamma) {
  return pg::evaluate_policy(env, [&](const Eigen::VectorXd& obs) { return agent.act(obs); }, n_episodes, seed,
                             gamma);
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const pg::Algorithm algorithm = pg::parse_algorithm(config.algorithm);
  std::unique_ptr<envs::Env> env = envs::make_env(config.env_id, config.env);
  std::unique_ptr<envs::Env> eval_env = env->clone();
  std::unique_ptr<pg::Agent> agent =
      pg::make_agent(algorithm, config.agent, env->obs_dim(), env->action_dim(), config.env.d0, config.seed);

  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create output directory '" + config.output_dir + "': " + ec.message());

  RunResult result;
  result.metrics_path = (dir / "metrics.csv").string();
  result.traces_path = (dir / "traces.csv").string();
  result.checkpoint_path = (dir / "checkpoint.json").string();
  save_experiment_config(config, (dir / "config.json").string());

  const std::uint64_t eval_seed = evaluation_seed(config.seed);
  const auto start = std::chrono::steady_clock::now();
  for (int it = 0; it < config.iterations; ++it) {
    const pg::IterationStats stats = agent->iterate(*env, it, config.episodes_per_iteration);
    const pg::ReturnSummary eval =
        evaluate_agent(*agent, *eval_env, config.eval_episodes, eval_seed, config.agent.gamma);
    MetricsRow row;
    row.iteration = it;
    row.mean_return = eval.mean_return;
    row.mean_constraint_return = eval.mean_constraint_return;
    row.violation_fraction = eval.violation_fraction;
    row.policy_kl = stats.policy_kl;
    if (stats.has_lambda) row.lambda = stats.lambda;
    if (config.record_wall_clock) {
      row.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    result.rows.push_back(row);
    add_traces(result.traces, it, stats, eval);
  }

  write_text_file(result.metrics_path, metrics_csv(result.rows));
  write_text_file(result.traces_path, traces_csv(result.traces));
  nn::save_checkpoint(agent->parameters(), result.checkpoint_path,
                      checkpoint_metadata(config, agent->scalars(), config.iterations));
  return result;
}

LoadedRun load_run(const std::string& checkpoint_path) {
  std::string meta_text;
  const nn::ParamVector params = nn::load_checkpoint(checkpoint_path, &meta_text);
  json meta;
  try {
    meta = json::parse(meta_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("checkpoint metadata is not JSON: ") + e.what());
  }
  require(meta.contains("config") && meta.contains("scalars"), ErrorCode::kInvalidArgument,
          "checkpoint metadata lacks config or scalars");
  LoadedRun run;
  run.config = experiment_config_from_json(meta.at("config").dump());
  run.iterations_completed = meta.value("iterations_completed", 0);
  run.env = envs::make_env(run.config.env_id, run.config.env);
  run.agent = pg::make_agent(pg::parse_algorithm(run.config.algorithm), run.config.agent, run.env->obs_dim(),
                             run.env->action_dim(), run.config.env.d0, run.config.seed);
  const json& s = meta.at("scalars");
  pg::AgentScalars scalars;
  scalars.lambda = s.value("lambda", 0.0);
  scalars.beta = s.value("beta", run.config.agent.beta);
  scalars.epsilon = s.value("epsilon", 0.0);
  scalars.has_baseline = s.value("has_baseline", false);
  run.agent->load(params, scalars);
  return run;
}

}  // namespace safe_rl::harness
