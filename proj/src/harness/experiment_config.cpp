#include "safe_rl/harness/experiment_config.hpp"

#include <set>

#include <json.hpp>

#include "safe_rl/common/error.hpp"
#include "safe_rl/common/io.hpp"

namespace safe_rl::harness {

using nlohmann::json;

namespace {

// Reads known keys from one JSON object and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string section) : j_(j), section_(std::move(section)) {
    require(j.is_object(), ErrorCode::kInvalidConfig, section_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      field = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, section_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      require(seen_.count(item.key()) > 0, ErrorCode::kInvalidConfig,
              "unknown key '" + section_ + "." + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string section_;
  std::set<std::string> seen_;
};

std::string optimizer_name(nn::OptimizerKind k) { return k == nn::OptimizerKind::kAdam ? "adam" : "sgd"; }

nn::OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return nn::OptimizerKind::kAdam;
  if (s == "sgd") return nn::OptimizerKind::kSgd;
  throw Error(ErrorCode::kInvalidConfig, "unknown optimizer '" + s + "'");
}

json env_to_json(const envs::EnvConfig& e) {
  return {{"horizon", e.horizon}, {"d0", e.d0},
          {"dt", e.dt},           {"noise_std", e.noise_std},
          {"action_scale", e.action_scale}, {"max_speed", e.max_speed}};
}

void env_from_json(const json& j, envs::EnvConfig& e) {
  Reader r(j, "env");
  r.get("horizon", e.horizon);
  r.get("d0", e.d0);
  r.get("dt", e.dt);
  r.get("noise_std", e.noise_std);
  r.get("action_scale", e.action_scale);
  r.get("max_speed", e.max_speed);
  r.finish();
}

json agent_to_json(const pg::SafePgConfig& c) {
  return {{"gamma", c.gamma},
          {"actor_hidden", c.actor_hidden},
          {"critic_hidden", c.critic_hidden},
          {"optimizer", optimizer_name(c.optimizer)},
          {"actor_lr", c.actor_lr},
          {"critic_lr", c.critic_lr},
          {"initial_log_var", c.initial_log_var},
          {"batch_size", c.batch_size},
          {"updates_per_iteration", c.updates_per_iteration},
          {"replay_capacity", c.replay_capacity},
          {"tau", c.tau},
          {"exploration_std", c.exploration_std},
          {"step_size", c.step_size},
          {"beta", c.beta},
          {"adaptive_beta", c.adaptive_beta},
          {"kl_target", c.kl_target},
          {"gae_lambda", c.gae_lambda},
          {"critic_epochs", c.critic_epochs},
          {"fisher_damping", c.fisher_damping},
          {"cg_iterations", c.cg_iterations},
          {"lambda_init", c.lambda_init},
          {"lambda_lr", c.lambda_lr},
          {"lambda_max", c.lambda_max},
          {"tightening", c.tightening},
          {"safeguard_margin", c.safeguard_margin},
          {"safeguard_multiplier", c.safeguard_multiplier},
          {"projection_k", c.projection_k},
          {"std_floor", c.std_floor}};
}

void agent_from_json(const json& j, pg::SafePgConfig& c) {
  Reader r(j, "agent");
  r.get("gamma", c.gamma);
  r.get("actor_hidden", c.actor_hidden);
  r.get("critic_hidden", c.critic_hidden);
  std::string opt = optimizer_name(c.optimizer);
  r.get("optimizer", opt);
  c.optimizer = parse_optimizer(opt);
  r.get("actor_lr", c.actor_lr);
  r.get("critic_lr", c.critic_lr);
  r.get("initial_log_var", c.initial_log_var);
  r.get("batch_size", c.batch_size);
  r.get("updates_per_iteration", c.updates_per_iteration);
  r.get("replay_capacity", c.replay_capacity);
  r.get("tau", c.tau);
  r.get("exploration_std", c.exploration_std);
  r.get("step_size", c.step_size);
  r.get("beta", c.beta);
  r.get("adaptive_beta", c.adaptive_beta);
  r.get("kl_target", c.kl_target);
  r.get("gae_lambda", c.gae_lambda);
  r.get("critic_epochs", c.critic_epochs);
  r.get("fisher_damping", c.fisher_damping);
  r.get("cg_iterations", c.cg_iterations);
  r.get("lambda_init", c.lambda_init);
  r.get("lambda_lr", c.lambda_lr);
  r.get("lambda_max", c.lambda_max);
  r.get("tightening", c.tightening);
  r.get("safeguard_margin", c.safeguard_margin);
  r.get("safeguard_multiplier", c.safeguard_multiplier);
  r.get("projection_k", c.projection_k);
  r.get("std_floor", c.std_floor);
  r.finish();
}

}  // namespace

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorCode::kInvalidConfig, what); };
  check(env_id == "point_circle" || env_id == "point_gather", "unknown environment id '" + env_id + "'");
  pg::parse_algorithm(algorithm);
  agent.validate();
  check(iterations >= 0, "iterations must be nonnegative");
  check(episodes_per_iteration > 0, "episodes_per_iteration must be positive");
  check(eval_episodes > 0, "eval_episodes must be positive");
  check(env.horizon > 0, "env.horizon must be positive");
  check(env.d0 > 0.0, "env.d0 must be positive");
  check(env.dt > 0.0 && env.noise_std >= 0.0 && env.action_scale > 0.0 && env.max_speed > 0.0,
        "bad env dynamics settings");
  check(!output_dir.empty(), "output_dir must be set");
}

ExperimentConfig default_experiment_config(const std::string& env_id, const std::string& algorithm) {
  ExperimentConfig c;
  c.env_id = env_id;
  c.env = envs::default_env_config(env_id);
  c.algorithm = algorithm;
  c.validate();
  return c;
}

std::string to_json(const ExperimentConfig& c, int indent) {
  const json j = {{"env_id", c.env_id},
                  {"env", env_to_json(c.env)},
                  {"algorithm", c.algorithm},
                  {"agent", agent_to_json(c.agent)},
                  {"iterations", c.iterations},
                  {"episodes_per_iteration", c.episodes_per_iteration},
                  {"eval_episodes", c.eval_episodes},
                  {"seed", c.seed},
                  {"output_dir", c.output_dir},
                  {"record_wall_clock", c.record_wall_clock}};
  return j.dump(indent);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(j, "config");
  r.get("env_id", c.env_id);
  if (c.env_id == "point_circle" || c.env_id == "point_gather") c.env = envs::default_env_config(c.env_id);
  if (const json* e = r.child("env")) env_from_json(*e, c.env);
  r.get("algorithm", c.algorithm);
  if (const json* a = r.child("agent")) agent_from_json(*a, c.agent);
  r.get("iterations", c.iterations);
  r.get("episodes_per_iteration", c.episodes_per_iteration);
  r.get("eval_episodes", c.eval_episodes);
  r.get("seed", c.seed);
  r.get("output_dir", c.output_dir);
  r.get("record_wall_clock", c.record_wall_clock);
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(read_text_file(path));
}

void save_experiment_config(const ExperimentConfig& config, const std::string& path) {
  write_text_file(path, to_json(config) + "\n");
}

}  // namespace safe_rl::harness
