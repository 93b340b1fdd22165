#include <doctest.h>

#include "fixtures.hpp"
#include "grad_check.hpp"
#include "pg_fixtures.hpp"
#include "safe_rl/common/error.hpp"
#include "safe_rl/nn/mlp.hpp"
#include "safe_rl/pg/ddpg.hpp"

using namespace safe_rl;
using namespace safe_rl::pg;

namespace {

// Q(x, a) = 1/2 |a - M x|^2 with dQ/da = a - M x.
struct QuadraticCritic {
  Eigen::MatrixXd m;
  double value(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const {
    return 0.5 * (actions - m * obs).colwise().squaredNorm().mean();
  }
  ActionGradFn grad() const {
    return [m = m](const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) -> Eigen::MatrixXd {
      return actions - m * obs;
    };
  }
};

}  // namespace

TEST_CASE("actor gradient of the output layer on a quadratic critic") {
  Rng rng(3);
  const nn::MlpSpec spec = nn::MlpSpec::make(3, {4}, 2, nn::Activation::kTanh, nn::OutputHead::kMean);
  const Eigen::VectorXd theta = nn::init_mlp(spec, rng).values;
  const Eigen::MatrixXd obs = Eigen::MatrixXd::NullaryExpr(3, 7, [&] { return gaussian(rng); });
  const QuadraticCritic q{Eigen::MatrixXd::NullaryExpr(2, 3, [&] { return gaussian(rng); })};
  const Eigen::VectorXd grad = deterministic_actor_grad(spec, theta, obs, q.grad());
  // mu = W2 h + b2 with h = tanh(W1 x + b1): dW2 = mean (mu - M x) h^T, db2 = mean (mu - M x).
  const Eigen::Map<const Eigen::MatrixXd> w1(theta.data(), 4, 3);
  const Eigen::VectorXd b1 = theta.segment(12, 4);
  const Eigen::Map<const Eigen::MatrixXd> w2(theta.data() + 16, 2, 4);
  const Eigen::VectorXd b2 = theta.segment(24, 2);
  const Eigen::MatrixXd h = ((w1 * obs).colwise() + b1).array().tanh().matrix();
  const Eigen::MatrixXd resid = (w2 * h).colwise() + b2 - q.m * obs;
  const Eigen::MatrixXd dw2 = resid * h.transpose() / 7.0;
  CHECK((grad.segment(16, 8) - Eigen::Map<const Eigen::VectorXd>(dw2.data(), 8)).norm() < 1e-12);
  CHECK((grad.tail(2) - resid.rowwise().mean()).norm() < 1e-12);
  // dh = W2^T resid, then through tanh: db1 = mean (1 - h^2) * dh.
  const Eigen::MatrixXd dpre = ((w2.transpose() * resid).array() * (1.0 - h.array().square())).matrix();
  CHECK((grad.segment(12, 4) - dpre.rowwise().mean()).norm() < 1e-12);
}

TEST_CASE("actor gradient through hidden layers matches finite differences") {
  Rng rng(4);
  const nn::MlpSpec spec = nn::MlpSpec::make(3, {6, 5}, 2, nn::Activation::kTanh, nn::OutputHead::kMean);
  const QuadraticCritic q{Eigen::MatrixXd::NullaryExpr(2, 3, [&] { return gaussian(rng); })};
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd theta = nn::init_mlp(spec, rng).values;
    const Eigen::MatrixXd obs = Eigen::MatrixXd::NullaryExpr(3, 4, [&] { return gaussian(rng); });
    const Eigen::VectorXd grad = deterministic_actor_grad(spec, theta, obs, q.grad());
    const Eigen::VectorXd dir = gaussian_vector(rng, theta.size());
    const double fd = fixtures::directional_fd(
        [&](const Eigen::VectorXd& t) { return q.value(obs, nn::mlp_forward(spec, t, obs)); }, theta, dir);
    CHECK(fixtures::relative_error(grad.dot(dir), fd) <= 1e-5);
  }
}

TEST_CASE("a-projection actor gradient") {
  Rng rng(5);
  const nn::MlpSpec spec = nn::MlpSpec::make(3, {6, 5}, 2, nn::Activation::kTanh, nn::OutputHead::kMean);
  const QuadraticCritic q{Eigen::MatrixXd::NullaryExpr(2, 3, [&] { return gaussian(rng); })};

  SUBCASE("inactive constraint gives the unconstrained gradient") {
    const Eigen::VectorXd theta = nn::init_mlp(spec, rng).values;
    const Eigen::MatrixXd obs = Eigen::MatrixXd::NullaryExpr(3, 5, [&] { return gaussian(rng); });
    const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(2, 5, [&] { return gaussian(rng); });
    const Eigen::MatrixXd base = nn::mlp_forward(spec, theta, obs);
    const Eigen::VectorXd free = deterministic_actor_grad(spec, theta, obs, q.grad());
    CHECK(a_projection_actor_grad(spec, theta, obs, q.grad(), g, base, 100.0) == free);
  }

  SUBCASE("active constraint along e1 removes the e1 component of dQ/da") {
    const Eigen::VectorXd theta = nn::init_mlp(spec, rng).values;
    const Eigen::MatrixXd obs = Eigen::MatrixXd::NullaryExpr(3, 1, [&] { return gaussian(rng); });
    const Eigen::MatrixXd mu = nn::mlp_forward(spec, theta, obs);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 1);
    g(0, 0) = 1.0;
    const Eigen::MatrixXd base = mu.array() + 1.0;  // g^T (mu - base) = -1 > eps
    const double eps = -2.0;
    Eigen::MatrixXd seen;
    const ActionGradFn record = [&](const Eigen::MatrixXd& o, const Eigen::MatrixXd& a) {
      seen = q.grad()(o, a);
      return seen;
    };
    const Eigen::VectorXd grad = a_projection_actor_grad(spec, theta, obs, record, g, base, eps);
    Eigen::MatrixXd expected_da = seen;
    expected_da(0, 0) = 0.0;
    const ActionGradFn fixed = [&](const Eigen::MatrixXd&, const Eigen::MatrixXd&) { return expected_da; };
    CHECK((grad - deterministic_actor_grad(spec, theta, obs, fixed)).norm() < 1e-12);
  }

  SUBCASE("random active cases match finite differences") {
    int active_seen = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const Eigen::VectorXd theta = nn::init_mlp(spec, rng).values;
      const Eigen::MatrixXd obs = Eigen::MatrixXd::NullaryExpr(3, 4, [&] { return gaussian(rng); });
      const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(2, 4, [&] { return gaussian(rng); });
      const Eigen::MatrixXd mu = nn::mlp_forward(spec, theta, obs);
      const Eigen::MatrixXd base = mu + Eigen::MatrixXd::NullaryExpr(2, 4, [&] { return gaussian(rng); });
      const double eps = uniform(rng, -0.5, 0.5);
      for (Eigen::Index i = 0; i < 4; ++i) {
        active_seen += safety_layer_project(mu.col(i), base.col(i), g.col(i), eps).active;
      }
      const Eigen::VectorXd grad = a_projection_actor_grad(spec, theta, obs, q.grad(), g, base, eps);
      const Eigen::VectorXd dir = gaussian_vector(rng, theta.size());
      const double fd = fixtures::directional_fd(
          [&](const Eigen::VectorXd& t) {
            return q.value(obs, project_actions(nn::mlp_forward(spec, t, obs), base, g, eps));
          },
          theta, dir, 1e-6);
      CHECK(fixtures::relative_error(grad.dot(dir), fd) <= 1e-4);
    }
    CHECK(active_seen > 100);
  }
}

TEST_CASE("critic converges to the geometric series on a one-state problem") {
  Rng rng(8);
  const double gamma = 0.9, c = 1.0;
  Critic q(2, {16}, nn::OptimizerKind::kAdam, 3e-3, rng);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Zero(1, 32);
  for (int it = 0; it < 6000; ++it) {
    const Eigen::MatrixXd actions = Eigen::MatrixXd::NullaryExpr(1, 32, [&] { return uniform(rng, -1, 1); });
    const Eigen::MatrixXd next = Eigen::MatrixXd::NullaryExpr(1, 32, [&] { return uniform(rng, -1, 1); });
    const Eigen::VectorXd y =
        bellman_targets(q, Eigen::VectorXd::Constant(32, c), Eigen::VectorXd::Ones(32), obs, next, gamma);
    q.regress(stack_inputs(obs, actions), y);
    q.soft_update(0.05);
  }
  const Eigen::MatrixXd probe = Eigen::MatrixXd::NullaryExpr(1, 11, [&] { return uniform(rng, -1, 1); });
  const Eigen::VectorXd values = q.values(stack_inputs(Eigen::MatrixXd::Zero(1, 11), probe));
  for (Eigen::Index i = 0; i < values.size(); ++i) CHECK(values[i] == doctest::Approx(c / (1 - gamma)).epsilon(0.01));
}

TEST_CASE("zero learning rates leave DDPG parameters unchanged") {
  SafePgConfig cfg = fixtures::small_config();
  cfg.actor_lr = 0.0;
  cfg.critic_lr = 0.0;
  auto env = fixtures::circle_env(false, false);
  for (SafetyMode mode : {SafetyMode::kNone, SafetyMode::kThetaProjection, SafetyMode::kActionProjection}) {
    DdpgAgent agent(mode, cfg, env->obs_dim(), env->action_dim(), 7.0, 1);
    const Eigen::VectorXd before = agent.actor_params();
    const Eigen::VectorXd qv = agent.qv().params();
    for (int it = 0; it < 3; ++it) agent.iterate(*env, it, 2);
    CHECK(agent.replay().size() >= cfg.batch_size);
    CHECK(agent.actor_params() == before);
    CHECK(agent.qv().params() == qv);
  }
}

TEST_CASE("empty replay buffer is an error") {
  SafePgConfig cfg = fixtures::small_config();
  DdpgAgent agent(SafetyMode::kNone, cfg, 4, 2, 7.0, 1);
  IterationStats stats;
  CHECK_THROWS_AS(agent.update_step(false, 0.0, stats), Error);
}

TEST_CASE("DDPG iterations are reproducible") {
  auto env = fixtures::circle_env(false, false);
  const SafePgConfig cfg = fixtures::small_config();
  DdpgAgent a(SafetyMode::kNone, cfg, env->obs_dim(), env->action_dim(), 7.0, 9);
  DdpgAgent b(SafetyMode::kNone, cfg, env->obs_dim(), env->action_dim(), 7.0, 9);
  for (int it = 0; it < 3; ++it) {
    a.iterate(*env, it, 2);
    b.iterate(*env, it, 2);
  }
  CHECK(a.actor_params() == b.actor_params());
  CHECK(a.actor_params() != DdpgAgent(SafetyMode::kNone, cfg, 4, 2, 7.0, 9).actor_params());
}
