#include "safe_rl/envs/point_mass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "safe_rl/common/error.hpp"

namespace safe_rl::envs {

namespace {

void check_config(const EnvConfig& c) {
  require(c.horizon > 0, ErrorCode::kInvalidConfig, "horizon must be positive");
  require(c.d0 >= 0.0, ErrorCode::kInvalidConfig, "d0 must be nonnegative");
  require(c.dt > 0.0 && c.action_scale > 0.0 && c.max_speed > 0.0, ErrorCode::kInvalidConfig,
          "dt, action_scale and max_speed must be positive");
  require(c.noise_std >= 0.0, ErrorCode::kInvalidConfig, "noise stddev must be nonnegative");
}

Eigen::Vector2d noisy_action(const Eigen::VectorXd& action, double noise_std, Rng& rng) {
  require_same_size(action.size(), 2, "point-mass action");
  require(action.allFinite(), ErrorCode::kNumerical, "non-finite action");
  Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  if (noise_std > 0.0) a += gaussian_vector(rng, 2, noise_std);
  return a;
}

}  // namespace

double point_circle_reward(const PointState& s) {
  const double x = s.position.x(), y = s.position.y();
  const double dx = s.velocity.x(), dy = s.velocity.y();
  return (-dx * y + dy * x) / (1.0 + std::abs(std::hypot(x, y) - PointCircle::kRadius));
}

double point_circle_constraint(const PointState& s) {
  return std::abs(s.position.x()) > PointCircle::kXLimit ? 1.0 : 0.0;
}

void point_mass_integrate(PointState& s, const Eigen::Vector2d& action, const EnvConfig& config) {
  s.velocity += config.dt * config.action_scale * action;
  const double speed = s.velocity.norm();
  if (speed > config.max_speed) s.velocity *= config.max_speed / speed;
  s.position += config.dt * s.velocity;
}

double segment_point_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& q) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - q).norm();
}

PointCircle::PointCircle(EnvConfig config) : config_(config) { check_config(config_); }

Eigen::VectorXd PointCircle::observe() {
  Eigen::VectorXd obs(4);
  obs << state_.position, state_.velocity;
  if (config_.noise_std > 0.0) obs += gaussian_vector(noise_, 4, config_.noise_std);
  return obs;
}

Eigen::VectorXd PointCircle::reset(std::uint64_t seed) {
  state_ = PointState{};
  noise_ = SeedTree(seed).stream("noise");
  t_ = 0;
  return observe();
}

StepResult PointCircle::step(const Eigen::VectorXd& action) {
  require(!done(), ErrorCode::kStepAfterDone, "point_circle episode is over");
  point_mass_integrate(state_, noisy_action(action, config_.noise_std, noise_), config_);
  ++t_;
  StepResult r;
  r.cost = -point_circle_reward(state_);
  r.constraint_cost = point_circle_constraint(state_);
  r.done = done();
  r.observation = observe();
  return r;
}

PointGather::PointGather(EnvConfig config) : config_(config) { check_config(config_); }

Eigen::VectorXd PointGather::observe() {
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(obs_dim());
  obs << state_.position, state_.velocity, Eigen::VectorXd::Zero(2 * kSensorBins);
  auto sense = [&](const std::vector<Eigen::Vector2d>& objects, int base) {
    for (const Eigen::Vector2d& o : objects) {
      const Eigen::Vector2d rel = o - state_.position;
      const double dist = rel.norm();
      if (dist >= kSensorRange) continue;
      const double angle = std::atan2(rel.y(), rel.x()) + std::numbers::pi;
      const int bin = std::min(kSensorBins - 1, static_cast<int>(angle / (2.0 * std::numbers::pi) * kSensorBins));
      obs[base + bin] = std::max(obs[base + bin], 1.0 - dist / kSensorRange);
    }
  };
  sense(apples_, 4);
  sense(bombs_, 4 + kSensorBins);
  if (config_.noise_std > 0.0) obs += gaussian_vector(noise_, obs.size(), config_.noise_std);
  return obs;
}

Eigen::VectorXd PointGather::reset(std::uint64_t seed) {
  const SeedTree tree(seed);
  Rng layout = tree.stream("layout");
  noise_ = tree.stream("noise");
  state_ = PointState{};
  t_ = 0;
  auto place = [&]() {
    for (;;) {
      const Eigen::Vector2d p(uniform(layout, -kHalfWidth, kHalfWidth), uniform(layout, -kHalfWidth, kHalfWidth));
      if (p.norm() > kSpawnFreeRadius) return p;
    }
  };
  apples_.clear();
  bombs_.clear();
  for (int i = 0; i < kApples; ++i) apples_.push_back(place());
  for (int i = 0; i < kBombs; ++i) bombs_.push_back(place());
  return observe();
}

void PointGather::set_layout(PointState s, std::vector<Eigen::Vector2d> apples, std::vector<Eigen::Vector2d> bombs) {
  state_ = s;
  apples_ = std::move(apples);
  bombs_ = std::move(bombs);
}

StepResult PointGather::step(const Eigen::VectorXd& action) {
  require(!done(), ErrorCode::kStepAfterDone, "point_gather episode is over");
  const Eigen::Vector2d start = state_.position;
  point_mass_integrate(state_, noisy_action(action, config_.noise_std, noise_), config_);
  for (int k = 0; k < 2; ++k) {  // arena walls stop the agent
    if (std::abs(state_.position[k]) > kHalfWidth) {
      state_.position[k] = std::copysign(kHalfWidth, state_.position[k]);
      state_.velocity[k] = 0.0;
    }
  }
  auto collect = [&](std::vector<Eigen::Vector2d>& objects) {
    const auto touched = [&](const Eigen::Vector2d& o) {
      return segment_point_distance(start, state_.position, o) <= kTouchRadius;
    };
    const auto before = objects.size();
    objects.erase(std::remove_if(objects.begin(), objects.end(), touched), objects.end());
    return static_cast<double>(before - objects.size());
  };
  const double apples = collect(apples_);
  const double bombs = collect(bombs_);
  ++t_;
  StepResult r;
  r.cost = kObjectCost * (bombs - apples);
  r.constraint_cost = bombs;
  r.done = done();
  r.observation = observe();
  return r;
}

EnvConfig default_env_config(const std::string& id) {
  EnvConfig c;
  if (id == "point_circle") {
    c.horizon = 65;
    c.d0 = 7.0;
    c.action_scale = 1.0;
    c.max_speed = 5.0;
  } else if (id == "point_gather") {
    c.horizon = 15;
    c.d0 = 2.0;
    c.action_scale = 20.0;
    c.max_speed = 10.0;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown environment id '" + id + "'");
  }
  return c;
}

std::unique_ptr<Env> make_env(const std::string& id, const EnvConfig& config) {
  if (id == "point_circle") return std::make_unique<PointCircle>(config);
  if (id == "point_gather") return std::make_unique<PointGather>(config);
  throw Error(ErrorCode::kInvalidConfig, "unknown environment id '" + id + "'");
}

}  // namespace safe_rl::envs
