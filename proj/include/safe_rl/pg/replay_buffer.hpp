#pragma once

#include <mutex>
#include <vector>

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"

namespace safe_rl::pg {

struct Transition {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double cost = 0.0;
  double constraint_cost = 0.0;
  Eigen::VectorXd next_obs;
  bool terminal = false;
};

struct TransitionBatch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd costs;
  Eigen::VectorXd constraint_costs;
  Eigen::MatrixXd next_obs;
  Eigen::VectorXd not_terminal;  // 1 - terminal
};

// Fixed-capacity ring buffer. add/sample are serialized by a mutex, so the
// linearization is the order in which callers acquire it.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void add(Transition t);
  int size() const;
  int capacity() const { return capacity_; }
  // Uniform sampling with replacement.
  TransitionBatch sample(int batch_size, Rng& rng) const;

 private:
  int capacity_;
  int next_ = 0;
  std::vector<Transition> data_;
  mutable std::mutex mutex_;
};

}  // namespace safe_rl::pg
