#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"
#include "safe_rl/common/rng.hpp"

namespace safe_rl::envs {

struct GridStep {
  int next_state = 0;
  double cost = 0.0;
  double constraint_cost = 0.0;
  bool done = false;
};

// Samples a TabularCmdp. Episodes start at x0 and end on entering an
// absorbing zero-cost state (exact: nothing more accrues there), or are
// truncated at `horizon` steps, which should make gamma^horizon negligible.
class GridworldEnv {
 public:
  GridworldEnv(cmdp::TabularCmdp cmdp, int horizon);

  const cmdp::TabularCmdp& cmdp() const { return cmdp_; }
  int horizon() const { return horizon_; }
  int state() const { return state_; }
  bool done() const { return absorbed_ || t_ >= horizon_; }
  bool absorbing(int x) const { return absorbing_[static_cast<std::size_t>(x)]; }

  int reset(std::uint64_t seed);
  GridStep step(int action);
  Eigen::VectorXd observation() const;  // one-hot

 private:
  cmdp::TabularCmdp cmdp_;
  int horizon_;
  int state_ = 0;
  int t_ = 0;
  bool absorbed_ = false;
  std::vector<bool> absorbing_;
  Rng rng_;
};

// A fixed 6-state corridor with a risky shortcut, used by estimator checks.
cmdp::TabularCmdp six_state_gridworld(double gamma = 0.9, double d0 = 1.0);

}  // namespace safe_rl::envs
