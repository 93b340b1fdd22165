#include "safe_rl/pg/lagrangian.hpp"

#include <algorithm>

#include "safe_rl/common/error.hpp"

namespace safe_rl::pg {

void LagrangeState::update(double constraint_estimate, double d0) {
  lambda = std::clamp(lambda + lr * (constraint_estimate - d0), 0.0, lambda_max);
}

TrajectoryGradient lagrangian_trajectory_gradient(envs::GridworldEnv& env, const nn::TabularSoftmaxPolicy& policy,
                                                  const Eigen::VectorXd& params, double lambda, int n_episodes,
                                                  Rng& rng, bool use_baseline) {
  require(n_episodes > 0, ErrorCode::kInvalidArgument, "need at least one episode");
  const double gamma = env.cmdp().gamma;
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(params.size(), n_episodes);
  Eigen::VectorXd cost(n_episodes), constraint(n_episodes);
  for (int j = 0; j < n_episodes; ++j) {
    int x = env.reset(rng());
    double c = 0.0, d = 0.0, disc = 1.0;
    Eigen::VectorXd score = Eigen::VectorXd::Zero(params.size());
    while (!env.done()) {
      const int a = policy.sample(params, x, rng);
      policy.accumulate_score(params, x, a, 1.0, score);
      const envs::GridStep s = env.step(a);
      c += disc * s.cost;
      d += disc * s.constraint_cost;
      disc *= gamma;
      x = s.next_state;
    }
    scores.col(j) = score;
    cost[j] = c;
    constraint[j] = d;
  }
  Eigen::VectorXd total = cost + lambda * constraint;
  if (use_baseline) total.array() -= total.mean();
  TrajectoryGradient out;
  out.grad = scores * total / n_episodes;
  out.mean_cost = cost.mean();
  out.mean_constraint = constraint.mean();
  return out;
}

TrajectoryGradient lagrangian_pg_update(envs::GridworldEnv& env, const nn::TabularSoftmaxPolicy& policy,
                                        Eigen::VectorXd& params, LagrangeState& state, double alpha2,
                                        int n_episodes, Rng& rng) {
  TrajectoryGradient g = lagrangian_trajectory_gradient(env, policy, params, state.lambda, n_episodes, rng);
  params -= alpha2 * g.grad;
  state.update(g.mean_constraint, env.cmdp().d0);
  return g;
}

ActorCritic::ActorCritic(int n_states, Eigen::Index n_params, double gamma_)
    : v(Eigen::VectorXd::Zero(n_states)), w(Eigen::VectorXd::Zero(n_params)), gamma(gamma_) {}

double ActorCritic::update(const nn::TabularSoftmaxPolicy& policy, Eigen::VectorXd& params, int x, int a,
                           double cost, double constraint_cost, int next_x, bool terminal, double lambda) {
  const double next_v = terminal ? 0.0 : v[next_x];
  const double delta = cost + lambda * constraint_cost + gamma * next_v - v[x];
  if (delta == 0.0 && !natural) return 0.0;
  v[x] += alpha3 * delta;
  Eigen::VectorXd score = Eigen::VectorXd::Zero(params.size());
  policy.accumulate_score(params, x, a, 1.0, score);
  if (natural) {
    w += alpha3 * (delta * score - score * score.dot(w));
    params -= alpha2 * w / (1.0 - gamma);
  } else {
    params -= alpha2 * score * delta / (1.0 - gamma);
  }
  return delta;
}

}  // namespace safe_rl::pg
