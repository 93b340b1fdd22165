#include "safe_rl/pg/ppo.hpp"

#include <cmath>

#include "safe_rl/common/error.hpp"
#include "safe_rl/nn/fisher.hpp"
#include "safe_rl/pg/ddpg.hpp"

namespace safe_rl::pg {

Eigen::VectorXd discount_weights(const nn::TrajectoryBatch& batch, double gamma) {
  Eigen::VectorXd w(batch.n_steps());
  const double scale = (1.0 - gamma) / batch.n_episodes();
  int t = 0;
  for (int len : batch.episode_lengths) {
    double disc = 1.0;
    for (int k = 0; k < len; ++k, ++t) {
      w[t] = scale * disc;
      disc *= gamma;
    }
  }
  return w;
}

double adapt_beta(double beta, double measured_kl, double kl_target) {
  if (measured_kl > 2.0 * kl_target) return beta * 2.0;
  if (measured_kl < 0.5 * kl_target) return beta * 0.5;
  return beta;
}

Eigen::VectorXd tabular_ppo_gradient(envs::GridworldEnv& env, const nn::TabularSoftmaxPolicy& policy,
                                     const Eigen::VectorXd& params, const Eigen::VectorXd& state_values,
                                     nn::Signal which, double gae_lambda, int n_episodes, Rng& rng) {
  require_same_size(state_values.size(), env.cmdp().n_states, "state values");
  const double gamma = env.cmdp().gamma;
  nn::TrajectoryBatch batch;
  std::vector<int> states, actions;
  for (int j = 0; j < n_episodes; ++j) {
    int x = env.reset(rng());
    std::vector<nn::Step> episode;
    while (!env.done()) {
      const int a = policy.sample(params, x, rng);
      const envs::GridStep s = env.step(a);
      nn::Step step;
      step.cost = s.cost;
      step.constraint_cost = s.constraint_cost;
      // An absorbed state has value 0; a truncated one is treated the same way.
      step.terminal = s.done;
      episode.push_back(step);
      states.push_back(x);
      actions.push_back(a);
      x = s.next_state;
    }
    if (episode.empty()) continue;
    batch.add_episode(std::move(episode));
  }
  require(batch.n_episodes() > 0, ErrorCode::kInvalidArgument, "no steps collected");
  Eigen::VectorXd values(batch.n_steps());
  for (int t = 0; t < batch.n_steps(); ++t) values[t] = state_values[states[static_cast<std::size_t>(t)]];
  const Eigen::VectorXd adv = nn::gae_advantages(batch, which, values, gamma, gae_lambda);
  Eigen::VectorXd w = discount_weights(batch, gamma) * batch.n_episodes() / n_episodes;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.size());
  for (int t = 0; t < batch.n_steps(); ++t) {
    policy.accumulate_score(params, states[static_cast<std::size_t>(t)], actions[static_cast<std::size_t>(t)],
                            w[t] * adv[t], grad);
  }
  return grad;
}

PpoAgent::PpoAgent(SafetyMode mode, const SafePgConfig& config, int obs_dim, int action_dim, double d0,
                   std::uint64_t seed)
    : mode_(mode),
      cfg_(config),
      obs_dim_(obs_dim),
      action_dim_(action_dim),
      d0_eff_(tighten_threshold(d0, config.tightening)),
      seeds_(seed),
      init_rng_(seeds_.stream("init")),
      sample_rng_(seeds_.stream("explore")),
      policy_(nn::MlpSpec::make(obs_dim, config.actor_hidden, 2 * action_dim, nn::Activation::kRelu,
                                nn::OutputHead::kMeanLogVariance),
              action_dim),
      theta_(policy_.init(init_rng_, config.initial_log_var).values),
      theta_baseline_(theta_),
      beta_(config.beta),
      v_(obs_dim, config.critic_hidden, config.optimizer, config.critic_lr, init_rng_),
      w_(obs_dim, config.critic_hidden, config.optimizer, config.critic_lr, init_rng_),
      qw_(obs_dim + action_dim, config.critic_hidden, config.optimizer, config.critic_lr, init_rng_) {
  cfg_.validate();
  lagrange_.lambda = cfg_.lambda_init;
  lagrange_.lambda_max = cfg_.lambda_max;
  lagrange_.lr = cfg_.lambda_lr;
}

PpoAgent::Behavior PpoAgent::behavior(const Eigen::VectorXd& obs) const {
  const nn::GaussianBatch d = policy_.distribution(theta_, Eigen::MatrixXd(obs));
  Behavior b{d.mean.col(0), d.stddev().col(0), {}, {}};
  if (mode_ != SafetyMode::kActionProjection || !has_baseline_) return b;
  const Eigen::MatrixXd a_b = policy_.distribution(theta_baseline_, Eigen::MatrixXd(obs)).mean;
  b.g = critic_action_grad(qw_)(Eigen::MatrixXd(obs), a_b).col(0);
  b.projection = safety_layer_project_gaussian(b.mean, b.stddev, a_b.col(0), b.g, epsilon_, cfg_.projection_k,
                                               cfg_.std_floor);
  b.mean = b.projection.action;
  b.stddev = b.projection.stddev;
  return b;
}

Eigen::VectorXd PpoAgent::act(const Eigen::VectorXd& obs) const { return behavior(obs).mean; }

Eigen::MatrixXd PpoAgent::score_columns(const nn::TrajectoryBatch& batch) const {
  const Eigen::MatrixXd states = batch.observations(), actions = batch.actions();
  if (mode_ != SafetyMode::kActionProjection || !has_baseline_) return policy_.scores(theta_, states, actions);
  // Score of the projected Gaussian with g_L and the shrink factor held fixed.
  Eigen::MatrixXd s(policy_.param_count(), states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    const Behavior b = behavior(states.col(i));
    if (b.projection.degenerate) {
      s.col(i) = policy_.scores(theta_, states.col(i), actions.col(i));
      continue;
    }
    nn::MlpTape tape;
    const nn::GaussianBatch d = policy_.distribution(theta_, Eigen::MatrixXd(states.col(i)), &tape);
    const Eigen::ArrayXd var = b.stddev.array().square();
    const Eigen::ArrayXd z = actions.col(i).array() - b.mean.array();
    Eigen::VectorXd grad_mean = (z / var).matrix();
    Eigen::VectorXd grad_lv = (0.5 * (z * z / var - 1.0)).matrix();
    if (b.projection.active) grad_mean = project_gradient(grad_mean, b.g, true);
    for (Eigen::Index k = 0; k < grad_lv.size(); ++k) {
      if (b.stddev[k] == cfg_.std_floor && d.stddev()(k, 0) != cfg_.std_floor) grad_lv[k] = 0.0;
    }
    s.col(i) = policy_.backward(theta_, tape, d, grad_mean, grad_lv);
  }
  return s;
}

IterationStats PpoAgent::iterate(envs::Env& env, int iteration, int episodes) {
  require(episodes > 0, ErrorCode::kInvalidArgument, "need at least one episode per iteration");
  std::vector<std::uint64_t> seeds;
  for (int j = 0; j < episodes; ++j) {
    seeds.push_back(seeds_.seed("train", static_cast<std::uint64_t>(iteration) * episodes + j));
  }
  const nn::TrajectoryBatch batch = rollout(env, seeds, [&](const Eigen::VectorXd& obs) {
    const Behavior b = behavior(obs);
    return Eigen::VectorXd(b.mean + b.stddev.cwiseProduct(gaussian_vector(sample_rng_, action_dim_, 1.0)));
  });
  return update(batch, env.config().d0);
}

IterationStats PpoAgent::update(const nn::TrajectoryBatch& batch, double d0_measure) {
  require(batch.n_episodes() > 0, ErrorCode::kInvalidArgument, "PPO update on a degenerate batch");
  IterationStats stats;
  stats.train = summarize(batch, cfg_.gamma, d0_measure);
  const double d_hat = stats.train.mean_constraint_return;
  const double epsilon = (1.0 - cfg_.gamma) * (d0_eff_ - d_hat);
  stats.epsilon = epsilon;
  const bool safe_mode = mode_ == SafetyMode::kThetaProjection || mode_ == SafetyMode::kActionProjection;
  stats.safeguard = safe_mode && safeguard_triggered(d_hat, d0_eff_, cfg_.safeguard_margin);

  const Eigen::MatrixXd states = batch.observations();
  const Eigen::MatrixXd actions = batch.actions();
  const Eigen::VectorXd adv_c =
      nn::gae_advantages(batch, nn::Signal::kCost, v_.values(states), cfg_.gamma, cfg_.gae_lambda);
  const Eigen::VectorXd adv_d =
      nn::gae_advantages(batch, nn::Signal::kConstraint, w_.values(states), cfg_.gamma, cfg_.gae_lambda);
  const Eigen::VectorXd weights = discount_weights(batch, cfg_.gamma);
  const Eigen::MatrixXd scores = score_columns(batch);
  const Eigen::VectorXd g_c = scores * weights.cwiseProduct(adv_c);
  const Eigen::VectorXd g_d = scores * weights.cwiseProduct(adv_d);

  const nn::FisherSolver fisher(scores, cfg_.fisher_damping, nn::CgOptions{1e-8, cfg_.cg_iterations});
  const HessianSolve h_inv = [&](const Eigen::VectorXd& v) {
    const nn::CgResult r = fisher.solve(v);
    if (!r.converged) ++stats.cg_failures;
    return r.x;
  };

  const Eigen::VectorXd theta_old = theta_;
  Eigen::VectorXd step;
  if (stats.safeguard) {
    step = safeguard_step(h_inv, g_d, cfg_.safeguard_multiplier * cfg_.step_size, beta_);
  } else if (mode_ == SafetyMode::kThetaProjection) {
    const ThetaProjection tp = theta_projection_multiplier(g_c, g_d, h_inv, epsilon, beta_);
    step = theta_projection_step(tp, cfg_.step_size, beta_);
    stats.lambda = tp.multiplier;
    stats.has_lambda = true;
  } else {
    ThetaProjection tp;
    tp.hinv_grad_c = h_inv(mode_ == SafetyMode::kLagrangian ? Eigen::VectorXd(g_c + lagrange_.lambda * g_d) : g_c);
    step = theta_projection_step(tp, cfg_.step_size, beta_);
  }
  theta_ += step;
  stats.policy_kl = policy_.mean_kl(theta_old, theta_, states);
  if (cfg_.adaptive_beta) beta_ = adapt_beta(beta_, stats.policy_kl, cfg_.kl_target);

  const Eigen::VectorXd ret_c = nn::returns_to_go(batch, nn::Signal::kCost, cfg_.gamma);
  const Eigen::VectorXd ret_d = nn::returns_to_go(batch, nn::Signal::kConstraint, cfg_.gamma);
  const Eigen::MatrixXd sa = stack_inputs(states, actions);
  for (int e = 0; e < cfg_.critic_epochs; ++e) {
    v_.regress(states, ret_c);
    w_.regress(states, ret_d);
    if (mode_ == SafetyMode::kActionProjection) qw_.regress(sa, ret_d);
  }

  if (mode_ == SafetyMode::kLagrangian) {
    lagrange_.update(d_hat, d0_eff_);
    stats.lambda = lagrange_.lambda;
    stats.has_lambda = true;
  }
  if (mode_ == SafetyMode::kActionProjection) {
    theta_baseline_ = theta_old;
    epsilon_ = epsilon;
    has_baseline_ = true;
  }
  return stats;
}

nn::ParamVector PpoAgent::parameters() const {
  const nn::ParamVector actor{theta_, {nn::ParamSlice{"params", 0, theta_.size(), 1}}};
  auto wrap = [](const Critic& c) { return nn::ParamVector{c.params(), c.spec().layout()}; };
  nn::ParamVector p = nn::concat(nn::ParamVector{}, actor, "actor.");
  p = nn::concat(p, wrap(v_), "v.");
  p = nn::concat(p, wrap(w_), "w.");
  p = nn::concat(p, wrap(qw_), "qw.");
  return nn::concat(p, nn::ParamVector{theta_baseline_, actor.layout}, "baseline.");
}

void PpoAgent::load(const nn::ParamVector& params, const AgentScalars& scalars) {
  const Eigen::Index na = theta_.size(), nv = v_.spec().param_count(), nq = qw_.spec().param_count();
  require_same_size(params.size(), 2 * na + 2 * nv + nq, "PPO checkpoint size");
  Eigen::Index off = 0;
  auto take = [&](Eigen::Index n) {
    Eigen::VectorXd out = params.values.segment(off, n);
    off += n;
    return out;
  };
  theta_ = take(na);
  v_.params() = take(nv);
  w_.params() = take(nv);
  qw_.params() = take(nq);
  theta_baseline_ = take(na);
  lagrange_.lambda = scalars.lambda;
  beta_ = scalars.beta;
  epsilon_ = scalars.epsilon;
  has_baseline_ = scalars.has_baseline;
}

AgentScalars PpoAgent::scalars() const { return {lagrange_.lambda, beta_, epsilon_, has_baseline_}; }

std::unique_ptr<Agent> make_agent(const Algorithm& algorithm, const SafePgConfig& config, int obs_dim,
                                  int action_dim, double d0, std::uint64_t seed) {
  if (algorithm.family == Family::kDdpg) {
    return std::make_unique<DdpgAgent>(algorithm.safety, config, obs_dim, action_dim, d0, seed);
  }
  return std::make_unique<PpoAgent>(algorithm.safety, config, obs_dim, action_dim, d0, seed);
}

}  // namespace safe_rl::pg
