#include "safe_rl/envs/gridworld.hpp"

#include "safe_rl/common/error.hpp"

namespace safe_rl::envs {

GridworldEnv::GridworldEnv(cmdp::TabularCmdp cmdp, int horizon) : cmdp_(std::move(cmdp)), horizon_(horizon) {
  cmdp_.validate();
  require(horizon_ > 0, ErrorCode::kInvalidConfig, "horizon must be positive");
  for (int x = 0; x < cmdp_.n_states; ++x) {
    bool absorbing = cmdp_.constraint_cost[x] == 0.0;
    for (int a = 0; a < cmdp_.n_actions && absorbing; ++a) {
      absorbing = cmdp_.cost(x, a) == 0.0 && cmdp_.transition(cmdp_.row(x, a), x) == 1.0;
    }
    absorbing_.push_back(absorbing);
  }
}

int GridworldEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  state_ = cmdp_.x0;
  t_ = 0;
  absorbed_ = absorbing_[static_cast<std::size_t>(state_)];
  return state_;
}

GridStep GridworldEnv::step(int action) {
  require(!done(), ErrorCode::kStepAfterDone, "gridworld episode is over");
  require(action >= 0 && action < cmdp_.n_actions, ErrorCode::kInvalidArgument, "action out of range");
  GridStep s;
  s.cost = cmdp_.cost(state_, action);
  s.constraint_cost = cmdp_.constraint_cost[state_];
  const auto probs = cmdp_.transition.row(cmdp_.row(state_, action));
  const double u = uniform(rng_, 0.0, 1.0);
  double acc = 0.0;
  int next = cmdp_.n_states - 1;
  for (int y = 0; y < cmdp_.n_states; ++y) {
    acc += probs[y];
    if (u < acc) {
      next = y;
      break;
    }
  }
  state_ = next;
  ++t_;
  absorbed_ = absorbing_[static_cast<std::size_t>(next)];
  s.next_state = next;
  s.done = done();
  return s;
}

Eigen::VectorXd GridworldEnv::observation() const {
  Eigen::VectorXd o = Eigen::VectorXd::Zero(cmdp_.n_states);
  o[state_] = 1.0;
  return o;
}

cmdp::TabularCmdp six_state_gridworld(double gamma, double d0) {
  // 0 -> {1 safe, 2 hazard} -> {3 safe, 4 hazard} -> 5 goal (absorbing).
  // Action 0 prefers the safe lane at cost 1, action 1 the hazard lane at cost 0.4.
  cmdp::TabularCmdp m;
  m.n_states = 6;
  m.n_actions = 2;
  m.gamma = gamma;
  m.d0 = d0;
  m.x0 = 0;
  m.transition = Eigen::MatrixXd::Zero(12, 6);
  m.cost = Eigen::MatrixXd::Zero(6, 2);
  m.constraint_cost = Eigen::VectorXd::Zero(6);
  m.constraint_cost[2] = m.constraint_cost[4] = 1.0;
  auto layer_move = [&](int x, int safe, int hazard) {
    m.transition(m.row(x, 0), safe) = 0.8;
    m.transition(m.row(x, 0), hazard) = 0.2;
    m.transition(m.row(x, 1), safe) = 0.1;
    m.transition(m.row(x, 1), hazard) = 0.9;
    m.cost(x, 0) = 1.0;
    m.cost(x, 1) = 0.4;
  };
  layer_move(0, 1, 2);
  layer_move(1, 3, 4);
  layer_move(2, 3, 4);
  for (int x : {3, 4}) {
    m.transition(m.row(x, 0), 5) = 0.9;
    m.transition(m.row(x, 0), x) = 0.1;
    m.transition(m.row(x, 1), 5) = 0.6;
    m.transition(m.row(x, 1), x) = 0.4;
    m.cost(x, 0) = 1.0;
    m.cost(x, 1) = 0.4;
  }
  m.transition(m.row(5, 0), 5) = 1.0;
  m.transition(m.row(5, 1), 5) = 1.0;
  m.validate();
  return m;
}

}  // namespace safe_rl::envs
