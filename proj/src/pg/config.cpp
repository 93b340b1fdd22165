#include "safe_rl/pg/config.hpp"

#include "safe_rl/common/error.hpp"

namespace safe_rl::pg {

namespace {

struct Entry {
  const char* id;
  Algorithm algorithm;
};

constexpr Entry kRegistry[] = {
    {"ddpg", {Family::kDdpg, SafetyMode::kNone}},
    {"ddpg_lagrangian", {Family::kDdpg, SafetyMode::kLagrangian}},
    {"sddpg", {Family::kDdpg, SafetyMode::kThetaProjection}},
    {"sddpg_aproj", {Family::kDdpg, SafetyMode::kActionProjection}},
    {"ppo", {Family::kPpo, SafetyMode::kNone}},
    {"ppo_lagrangian", {Family::kPpo, SafetyMode::kLagrangian}},
    {"sppo", {Family::kPpo, SafetyMode::kThetaProjection}},
    {"sppo_aproj", {Family::kPpo, SafetyMode::kActionProjection}},
};

}  // namespace

Algorithm parse_algorithm(const std::string& id) {
  for (const Entry& e : kRegistry) {
    if (id == e.id) return e.algorithm;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown algorithm id '" + id + "'");
}

std::string algorithm_id(const Algorithm& a) {
  for (const Entry& e : kRegistry) {
    if (e.algorithm.family == a.family && e.algorithm.safety == a.safety) return e.id;
  }
  return "unknown";
}

const std::vector<std::string>& algorithm_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const Entry& e : kRegistry) out.emplace_back(e.id);
    return out;
  }();
  return ids;
}

void SafePgConfig::validate() const {
  auto check = [](bool ok, const char* what) { require(ok, ErrorCode::kInvalidConfig, what); };
  check(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  check(!actor_hidden.empty() && !critic_hidden.empty(), "networks need at least one hidden layer");
  check(actor_lr >= 0.0 && critic_lr >= 0.0 && step_size >= 0.0, "learning rates must be nonnegative");
  check(batch_size > 0 && updates_per_iteration >= 0 && replay_capacity > 0, "bad DDPG sizes");
  check(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  check(exploration_std >= 0.0, "exploration stddev must be nonnegative");
  check(beta > 0.0 && kl_target > 0.0, "beta and kl_target must be positive");
  check(gae_lambda >= 0.0 && gae_lambda <= 1.0, "gae_lambda must lie in [0, 1]");
  check(critic_epochs >= 0 && cg_iterations > 0, "bad PPO iteration counts");
  check(fisher_damping > 0.0, "fisher damping must be positive");
  check(lambda_init >= 0.0 && lambda_init <= lambda_max && lambda_lr > 0.0, "bad Lagrange settings");
  check(tightening >= 0.0 && tightening < 1.0, "tightening must lie in [0, 1)");
  check(safeguard_margin >= 0.0 && safeguard_multiplier > 0.0, "bad safeguard settings");
  check(projection_k >= 0.0 && std_floor > 0.0, "bad projection settings");
}

}  // namespace safe_rl::pg
