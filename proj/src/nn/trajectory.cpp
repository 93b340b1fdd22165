#include "safe_rl/nn/trajectory.hpp"

#include "safe_rl/common/error.hpp"

namespace safe_rl::nn {

void TrajectoryBatch::add_episode(std::vector<Step> episode) {
  require(!episode.empty(), ErrorCode::kInvalidArgument, "empty episode");
  episode_lengths.push_back(static_cast<int>(episode.size()));
  for (Step& s : episode) steps.push_back(std::move(s));
}

int TrajectoryBatch::episode_begin(int e) const {
  int begin = 0;
  for (int i = 0; i < e; ++i) begin += episode_lengths[i];
  return begin;
}

void TrajectoryBatch::validate() const {
  long total = 0;
  for (int len : episode_lengths) {
    require(len > 0, ErrorCode::kInvariantViolation, "episode length must be positive");
    total += len;
  }
  require_same_size(total, static_cast<long>(steps.size()), "episode lengths vs steps");
  int t = 0;
  for (int len : episode_lengths) {
    for (int k = 0; k < len; ++k, ++t) {
      require(!steps[t].terminal || k == len - 1, ErrorCode::kInvariantViolation,
              "terminal flag before episode end");
      require(steps[t].constraint_cost >= 0.0, ErrorCode::kInvariantViolation,
              "negative constraint cost");
    }
  }
}

namespace {

Eigen::MatrixXd stack(const std::vector<Step>& steps, Eigen::VectorXd Step::*field) {
  if (steps.empty()) return {};
  Eigen::MatrixXd m((steps.front().*field).size(), static_cast<Eigen::Index>(steps.size()));
  for (std::size_t i = 0; i < steps.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = steps[i].*field;
  return m;
}

}  // namespace

Eigen::MatrixXd TrajectoryBatch::observations() const { return stack(steps, &Step::obs); }
Eigen::MatrixXd TrajectoryBatch::next_observations() const { return stack(steps, &Step::next_obs); }
Eigen::MatrixXd TrajectoryBatch::actions() const { return stack(steps, &Step::action); }

Eigen::VectorXd discounted_returns(const TrajectoryBatch& batch, Signal which, double gamma) {
  Eigen::VectorXd out(batch.n_episodes());
  int t = 0;
  for (int e = 0; e < batch.n_episodes(); ++e) {
    double acc = 0.0, disc = 1.0;
    for (int k = 0; k < batch.episode_lengths[e]; ++k, ++t) {
      acc += disc * batch.signal(t, which);
      disc *= gamma;
    }
    out[e] = acc;
  }
  return out;
}

Eigen::VectorXd returns_to_go(const TrajectoryBatch& batch, Signal which, double gamma) {
  Eigen::VectorXd out(batch.n_steps());
  int end = batch.n_steps();
  for (int e = batch.n_episodes() - 1; e >= 0; --e) {
    const int begin = end - batch.episode_lengths[e];
    double acc = 0.0;
    for (int t = end - 1; t >= begin; --t) {
      acc = batch.signal(t, which) + gamma * acc;
      out[t] = acc;
    }
    end = begin;
  }
  return out;
}

Eigen::VectorXd gae_advantages(const TrajectoryBatch& batch, Signal which, const Eigen::VectorXd& values,
                               double gamma, double lambda, const Eigen::VectorXd* bootstrap) {
  require_same_size(values.size(), batch.n_steps(), "values vs steps");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  if (bootstrap) require_same_size(bootstrap->size(), batch.n_episodes(), "bootstrap vs episodes");
  Eigen::VectorXd adv(batch.n_steps());
  int end = batch.n_steps();
  for (int e = batch.n_episodes() - 1; e >= 0; --e) {
    const int begin = end - batch.episode_lengths[e];
    double next_value = 0.0;
    if (bootstrap && !batch.steps[end - 1].terminal) next_value = (*bootstrap)[e];
    double acc = 0.0;
    for (int t = end - 1; t >= begin; --t) {
      const double delta = batch.signal(t, which) + gamma * next_value - values[t];
      acc = delta + gamma * lambda * acc;
      adv[t] = acc;
      next_value = values[t];
    }
    end = begin;
  }
  return adv;
}

}  // namespace safe_rl::nn
