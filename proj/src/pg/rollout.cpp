#include "safe_rl/pg/rollout.hpp"

#include "safe_rl/common/error.hpp"
#include "safe_rl/common/rng.hpp"

namespace safe_rl::pg {

nn::TrajectoryBatch rollout(envs::Env& env, const std::vector<std::uint64_t>& seeds, const ActionFn& act) {
  nn::TrajectoryBatch batch;
  for (std::uint64_t seed : seeds) {
    std::vector<nn::Step> episode;
    Eigen::VectorXd obs = env.reset(seed);
    while (!env.done()) {
      nn::Step s;
      s.obs = obs;
      s.action = act(obs);
      const envs::StepResult r = env.step(s.action);
      s.cost = r.cost;
      s.constraint_cost = r.constraint_cost;
      s.next_obs = r.observation;
      s.terminal = r.done;
      obs = r.observation;
      episode.push_back(std::move(s));
    }
    batch.add_episode(std::move(episode));
  }
  return batch;
}

ReturnSummary summarize(const nn::TrajectoryBatch& batch, double gamma, double d0) {
  require(batch.n_episodes() > 0, ErrorCode::kInvalidArgument, "summary of an empty batch");
  ReturnSummary s;
  s.returns = nn::discounted_returns(batch, nn::Signal::kCost, gamma);
  s.constraint_returns = nn::discounted_returns(batch, nn::Signal::kConstraint, gamma);
  s.mean_return = s.returns.mean();
  s.mean_constraint_return = s.constraint_returns.mean();
  s.violation_fraction = (s.constraint_returns.array() > d0).cast<double>().mean();
  return s;
}

ReturnSummary evaluate_policy(envs::Env& env, const ActionFn& deterministic_policy, int n_episodes,
                              std::uint64_t seed, double gamma) {
  require(n_episodes > 0, ErrorCode::kInvalidArgument, "evaluation needs at least one episode");
  const SeedTree tree(seed);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n_episodes; ++i) seeds.push_back(tree.seed("eval", static_cast<std::uint64_t>(i)));
  return summarize(rollout(env, seeds, deterministic_policy), gamma, env.config().d0);
}

}  // namespace safe_rl::pg
