#pragma once

#include <vector>

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"
#include "safe_rl/envs/env.hpp"

namespace safe_rl::envs {

struct PointState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

// Counter-clockwise motion along the radius-15 circle.
double point_circle_reward(const PointState& s);
double point_circle_constraint(const PointState& s);

// Double integrator: v += dt * scale * a (clamped to max_speed), p += dt * v.
void point_mass_integrate(PointState& s, const Eigen::Vector2d& action, const EnvConfig& config);

class PointCircle final : public Env {
 public:
  static constexpr double kRadius = 15.0;
  static constexpr double kXLimit = 2.5;

  explicit PointCircle(EnvConfig config);

  std::string name() const override { return "point_circle"; }
  int obs_dim() const override { return 4; }
  int action_dim() const override { return 2; }
  const EnvConfig& config() const override { return config_; }
  Eigen::VectorXd reset(std::uint64_t seed) override;
  StepResult step(const Eigen::VectorXd& action) override;
  bool done() const override { return t_ >= config_.horizon; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointCircle>(*this); }

  const PointState& state() const { return state_; }
  void set_state(const PointState& s) { state_ = s; }

 private:
  Eigen::VectorXd observe();

  EnvConfig config_;
  PointState state_;
  Rng noise_;
  int t_ = 0;
};

class PointGather final : public Env {
 public:
  static constexpr int kApples = 2;
  static constexpr int kBombs = 8;
  static constexpr double kHalfWidth = 5.0;  // 10 x 10 arena centred on the origin
  static constexpr double kSpawnFreeRadius = 1.5;
  static constexpr double kTouchRadius = 0.4;
  static constexpr double kSensorRange = 6.0;
  static constexpr int kSensorBins = 8;
  static constexpr double kObjectCost = 10.0;

  explicit PointGather(EnvConfig config);

  std::string name() const override { return "point_gather"; }
  int obs_dim() const override { return 4 + 2 * kSensorBins; }
  int action_dim() const override { return 2; }
  const EnvConfig& config() const override { return config_; }
  Eigen::VectorXd reset(std::uint64_t seed) override;
  StepResult step(const Eigen::VectorXd& action) override;
  bool done() const override { return t_ >= config_.horizon; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointGather>(*this); }

  const PointState& state() const { return state_; }
  const std::vector<Eigen::Vector2d>& apples() const { return apples_; }
  const std::vector<Eigen::Vector2d>& bombs() const { return bombs_; }
  // Test hook: replace the layout and agent state after reset.
  void set_layout(PointState s, std::vector<Eigen::Vector2d> apples, std::vector<Eigen::Vector2d> bombs);

 private:
  Eigen::VectorXd observe();

  EnvConfig config_;
  PointState state_;
  std::vector<Eigen::Vector2d> apples_;
  std::vector<Eigen::Vector2d> bombs_;
  Rng noise_;
  int t_ = 0;
};

// Distance from point q to the segment [a, b].
double segment_point_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& q);

}  // namespace safe_rl::envs
