#include <doctest.h>

#include "pg_fixtures.hpp"
#include "safe_rl/pg/agent.hpp"

using namespace safe_rl;
using namespace safe_rl::pg;

namespace {

// Runs `iterations` of two agents on the same constraint-free environment
// and returns the largest parameter difference seen along the way.
double max_trajectory_gap(const std::string& a_id, const std::string& b_id, int iterations) {
  auto env = fixtures::circle_env(false, true);
  const SafePgConfig cfg = fixtures::small_config();
  auto a = make_agent(parse_algorithm(a_id), cfg, env->obs_dim(), env->action_dim(), 7.0, 21);
  auto b = make_agent(parse_algorithm(b_id), cfg, env->obs_dim(), env->action_dim(), 7.0, 21);
  double gap = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const IterationStats sa = a->iterate(*env, it, 3);
    const IterationStats sb = b->iterate(*env, it, 3);
    CHECK_FALSE(sb.safeguard);
    CHECK(sb.lambda == 0.0);
    gap = std::max(gap, (a->actor_params() - b->actor_params()).cwiseAbs().maxCoeff());
    CHECK(sa.train.mean_return == sb.train.mean_return);
  }
  return gap;
}

}  // namespace

TEST_CASE("with zero constraint cost the safe variants reduce to their baselines") {
  CHECK(max_trajectory_gap("ddpg", "sddpg", 6) <= 1e-12);
  CHECK(max_trajectory_gap("ddpg", "sddpg_aproj", 6) <= 1e-12);
  CHECK(max_trajectory_gap("ppo", "sppo", 6) <= 1e-12);
  CHECK(max_trajectory_gap("ppo", "sppo_aproj", 6) <= 1e-12);
}

TEST_CASE("with zero constraint cost the safe variant's parameters actually move") {
  auto env = fixtures::circle_env(false, true);
  auto agent = make_agent(parse_algorithm("sppo"), fixtures::small_config(), env->obs_dim(), env->action_dim(),
                          7.0, 21);
  const Eigen::VectorXd before = agent->actor_params();
  agent->iterate(*env, 0, 3);
  CHECK(agent->actor_params() != before);
}
