#include "safe_rl/pg/ddpg.hpp"

#include <cmath>
#include <optional>

#include "safe_rl/common/error.hpp"
#include "safe_rl/nn/fisher.hpp"

namespace safe_rl::pg {

ActionGradFn critic_action_grad(const Critic& critic) {
  return [&critic](const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) -> Eigen::MatrixXd {
    return critic.input_grad(stack_inputs(obs, actions)).bottomRows(actions.rows());
  };
}

Eigen::VectorXd bellman_targets(const Critic& critic, const Eigen::VectorXd& signal,
                                const Eigen::VectorXd& not_terminal, const Eigen::MatrixXd& next_obs,
                                const Eigen::MatrixXd& next_actions, double gamma) {
  const Eigen::VectorXd next_q = critic.target_values(stack_inputs(next_obs, next_actions));
  return signal + gamma * not_terminal.cwiseProduct(next_q);
}

Eigen::VectorXd deterministic_actor_grad(const nn::MlpSpec& actor, const Eigen::VectorXd& theta,
                                         const Eigen::MatrixXd& obs, const ActionGradFn& dq_da) {
  nn::MlpTape tape;
  const Eigen::MatrixXd mu = nn::mlp_forward(actor, theta, obs, &tape);
  const Eigen::MatrixXd grad_a = dq_da(obs, mu) / static_cast<double>(obs.cols());
  return nn::mlp_backward(actor, theta, tape, grad_a).params;
}

Eigen::MatrixXd project_actions(const Eigen::MatrixXd& actions, const Eigen::MatrixXd& baseline_actions,
                                const Eigen::MatrixXd& g, double epsilon) {
  Eigen::MatrixXd out(actions.rows(), actions.cols());
  for (Eigen::Index i = 0; i < actions.cols(); ++i) {
    out.col(i) = safety_layer_project(actions.col(i), baseline_actions.col(i), g.col(i), epsilon).action;
  }
  return out;
}

Eigen::VectorXd a_projection_actor_grad(const nn::MlpSpec& actor, const Eigen::VectorXd& theta,
                                        const Eigen::MatrixXd& obs, const ActionGradFn& dq_da,
                                        const Eigen::MatrixXd& g, const Eigen::MatrixXd& baseline_actions,
                                        double epsilon) {
  nn::MlpTape tape;
  const Eigen::MatrixXd mu = nn::mlp_forward(actor, theta, obs, &tape);
  Eigen::MatrixXd projected(mu.rows(), mu.cols());
  std::vector<bool> active(static_cast<std::size_t>(mu.cols()));
  for (Eigen::Index i = 0; i < mu.cols(); ++i) {
    const ProjectionResult r = safety_layer_project(mu.col(i), baseline_actions.col(i), g.col(i), epsilon);
    projected.col(i) = r.action;
    active[static_cast<std::size_t>(i)] = r.active;
  }
  Eigen::MatrixXd grad_a = dq_da(obs, projected) / static_cast<double>(obs.cols());
  for (Eigen::Index i = 0; i < mu.cols(); ++i) {
    grad_a.col(i) = project_gradient(grad_a.col(i), g.col(i), active[static_cast<std::size_t>(i)]);
  }
  return nn::mlp_backward(actor, theta, tape, grad_a).params;
}

Eigen::MatrixXd deterministic_fisher_columns(const nn::MlpSpec& actor, const Eigen::VectorXd& theta,
                                             const Eigen::MatrixXd& obs, double sigma) {
  require(sigma > 0.0, ErrorCode::kInvalidArgument, "Fisher columns need a positive sigma");
  const int dim = actor.output_dim();
  const double scale = std::sqrt(static_cast<double>(dim)) / sigma;
  Eigen::MatrixXd cols(theta.size(), obs.cols() * dim);
  for (Eigen::Index i = 0; i < obs.cols(); ++i) {
    nn::MlpTape tape;
    nn::mlp_forward(actor, theta, Eigen::MatrixXd(obs.col(i)), &tape);
    for (int k = 0; k < dim; ++k) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, 1);
      e(k, 0) = scale;
      cols.col(i * dim + k) = nn::mlp_backward(actor, theta, tape, e).params;
    }
  }
  return cols;
}

DdpgAgent::DdpgAgent(SafetyMode mode, const SafePgConfig& config, int obs_dim, int action_dim, double d0,
                     std::uint64_t seed)
    : mode_(mode),
      cfg_(config),
      obs_dim_(obs_dim),
      action_dim_(action_dim),
      d0_eff_(tighten_threshold(d0, config.tightening)),
      seeds_(seed),
      init_rng_(seeds_.stream("init")),
      explore_rng_(seeds_.stream("explore")),
      replay_rng_(seeds_.stream("replay")),
      actor_spec_(nn::MlpSpec::make(obs_dim, config.actor_hidden, action_dim, nn::Activation::kRelu,
                                    nn::OutputHead::kMean)),
      theta_(nn::init_mlp(actor_spec_, init_rng_).values),
      theta_target_(theta_),
      theta_baseline_(theta_),
      qv_(obs_dim + action_dim, config.critic_hidden, config.optimizer, config.critic_lr, init_rng_),
      qw_(obs_dim + action_dim, config.critic_hidden, config.optimizer, config.critic_lr, init_rng_),
      replay_(config.replay_capacity),
      actor_opt_(config.optimizer, config.actor_lr) {
  cfg_.validate();
  lagrange_.lambda = cfg_.lambda_init;
  lagrange_.lambda_max = cfg_.lambda_max;
  lagrange_.lr = cfg_.lambda_lr;
}

Eigen::MatrixXd DdpgAgent::policy_actions(const Eigen::MatrixXd& obs) const {
  const Eigen::MatrixXd mu = nn::mlp_forward(actor_spec_, theta_, obs);
  if (mode_ != SafetyMode::kActionProjection || !has_baseline_) return mu;
  const Eigen::MatrixXd a_b = nn::mlp_forward(actor_spec_, theta_baseline_, obs);
  return project_actions(mu, a_b, critic_action_grad(qw_)(obs, a_b), epsilon_);
}

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd& obs) const {
  return policy_actions(Eigen::MatrixXd(obs)).col(0);
}

IterationStats DdpgAgent::iterate(envs::Env& env, int iteration, int episodes) {
  require(episodes > 0, ErrorCode::kInvalidArgument, "need at least one episode per iteration");
  std::vector<std::uint64_t> seeds;
  for (int j = 0; j < episodes; ++j) {
    seeds.push_back(seeds_.seed("train", static_cast<std::uint64_t>(iteration) * episodes + j));
  }
  const nn::TrajectoryBatch batch = rollout(env, seeds, [&](const Eigen::VectorXd& obs) {
    Eigen::VectorXd a = act(obs);
    if (cfg_.exploration_std > 0.0) a += gaussian_vector(explore_rng_, action_dim_, cfg_.exploration_std);
    return a;
  });
  for (const nn::Step& s : batch.steps) {
    replay_.add({s.obs, s.action, s.cost, s.constraint_cost, s.next_obs, s.terminal});
  }

  IterationStats stats;
  stats.train = summarize(batch, cfg_.gamma, env.config().d0);
  const double d_hat = stats.train.mean_constraint_return;
  const double epsilon = (1.0 - cfg_.gamma) * (d0_eff_ - d_hat);
  const bool safe_mode = mode_ == SafetyMode::kThetaProjection || mode_ == SafetyMode::kActionProjection;
  stats.safeguard = safe_mode && safeguard_triggered(d_hat, d0_eff_, cfg_.safeguard_margin);
  stats.epsilon = epsilon;
  if (mode_ == SafetyMode::kActionProjection) {
    // The policy that just collected data becomes the anchor of the safety layer.
    theta_baseline_ = theta_;
    epsilon_ = epsilon;
    has_baseline_ = true;
  }

  const Eigen::MatrixXd states = batch.observations();
  const Eigen::MatrixXd mu_before = nn::mlp_forward(actor_spec_, theta_, states);
  if (replay_.size() >= cfg_.batch_size) {
    for (int u = 0; u < cfg_.updates_per_iteration; ++u) update_step(stats.safeguard, epsilon, stats);
  }
  const Eigen::MatrixXd mu_after = nn::mlp_forward(actor_spec_, theta_, states);
  const double sigma = cfg_.exploration_std > 0.0 ? cfg_.exploration_std : 1.0;
  stats.policy_kl = (mu_after - mu_before).colwise().squaredNorm().mean() / (2.0 * sigma * sigma);

  if (mode_ == SafetyMode::kLagrangian) {
    lagrange_.update(d_hat, d0_eff_);
    stats.lambda = lagrange_.lambda;
    stats.has_lambda = true;
  }
  return stats;
}

void DdpgAgent::update_step(bool safeguard, double epsilon, IterationStats& stats) {
  const TransitionBatch b = replay_.sample(cfg_.batch_size, replay_rng_);
  const Eigen::MatrixXd next_a = nn::mlp_forward(actor_spec_, theta_target_, b.next_obs);
  const Eigen::VectorXd y_c = bellman_targets(qv_, b.costs, b.not_terminal, b.next_obs, next_a, cfg_.gamma);
  const Eigen::VectorXd y_d =
      bellman_targets(qw_, b.constraint_costs, b.not_terminal, b.next_obs, next_a, cfg_.gamma);
  const Eigen::MatrixXd x = stack_inputs(b.obs, b.actions);
  qv_.regress(x, y_c);
  qw_.regress(x, y_d);

  const ActionGradFn dqv = critic_action_grad(qv_);
  const ActionGradFn dqw = critic_action_grad(qw_);
  const bool safe_mode = mode_ == SafetyMode::kThetaProjection || mode_ == SafetyMode::kActionProjection;
  if (safe_mode && safeguard) {
    const Eigen::VectorXd g_d = deterministic_actor_grad(actor_spec_, theta_, b.obs, dqw);
    theta_ -= cfg_.safeguard_multiplier * cfg_.actor_lr * g_d;
  } else {
    Eigen::VectorXd grad;
    switch (mode_) {
      case SafetyMode::kNone:
        grad = deterministic_actor_grad(actor_spec_, theta_, b.obs, dqv);
        break;
      case SafetyMode::kLagrangian:
        grad = deterministic_actor_grad(actor_spec_, theta_, b.obs, dqv) +
               lagrange_.lambda * deterministic_actor_grad(actor_spec_, theta_, b.obs, dqw);
        break;
      case SafetyMode::kThetaProjection: {
        const Eigen::VectorXd g_c = deterministic_actor_grad(actor_spec_, theta_, b.obs, dqv);
        const Eigen::VectorXd g_d = deterministic_actor_grad(actor_spec_, theta_, b.obs, dqw);
        std::optional<nn::FisherSolver> fisher;
        if (g_d.norm() >= kDegenerateNorm) {
          fisher.emplace(deterministic_fisher_columns(actor_spec_, theta_, b.obs,
                                                      cfg_.exploration_std > 0.0 ? cfg_.exploration_std : 1.0),
                         cfg_.fisher_damping, nn::CgOptions{1e-8, cfg_.cg_iterations});
        }
        const ThetaProjection tp = theta_projection_multiplier(
            g_c, g_d,
            [&](const Eigen::VectorXd& v) {
              if (!fisher) return Eigen::VectorXd(v);  // unused on the degenerate path
              const nn::CgResult r = fisher->solve(v);
              if (!r.converged) ++stats.cg_failures;
              return r.x;
            },
            epsilon, cfg_.beta);
        grad = tp.multiplier == 0.0 ? g_c : Eigen::VectorXd(g_c + tp.multiplier * g_d);
        stats.lambda = tp.multiplier;
        stats.has_lambda = true;
        break;
      }
      case SafetyMode::kActionProjection: {
        const Eigen::MatrixXd a_b = nn::mlp_forward(actor_spec_, theta_baseline_, b.obs);
        grad = a_projection_actor_grad(actor_spec_, theta_, b.obs, dqv, dqw(b.obs, a_b), a_b, epsilon_);
        break;
      }
    }
    actor_opt_.step(theta_, grad);
  }
  theta_target_ = (1.0 - cfg_.tau) * theta_target_ + cfg_.tau * theta_;
  qv_.soft_update(cfg_.tau);
  qw_.soft_update(cfg_.tau);
}

nn::ParamVector DdpgAgent::parameters() const {
  auto wrap = [](const Eigen::VectorXd& v, const nn::MlpSpec& spec) { return nn::ParamVector{v, spec.layout()}; };
  nn::ParamVector p = nn::concat(nn::ParamVector{}, wrap(theta_, actor_spec_), "actor.");
  p = nn::concat(p, wrap(qv_.params(), qv_.spec()), "qv.");
  p = nn::concat(p, wrap(qw_.params(), qw_.spec()), "qw.");
  return nn::concat(p, wrap(theta_baseline_, actor_spec_), "baseline.");
}

void DdpgAgent::load(const nn::ParamVector& params, const AgentScalars& scalars) {
  const Eigen::Index na = actor_spec_.param_count(), nq = qv_.spec().param_count();
  require_same_size(params.size(), 2 * na + 2 * nq, "DDPG checkpoint size");
  theta_ = params.values.segment(0, na);
  theta_target_ = theta_;
  qv_.params() = params.values.segment(na, nq);
  qw_.params() = params.values.segment(na + nq, nq);
  theta_baseline_ = params.values.segment(na + 2 * nq, na);
  lagrange_.lambda = scalars.lambda;
  epsilon_ = scalars.epsilon;
  has_baseline_ = scalars.has_baseline;
}

AgentScalars DdpgAgent::scalars() const { return {lagrange_.lambda, cfg_.beta, epsilon_, has_baseline_}; }

}  // namespace safe_rl::pg
