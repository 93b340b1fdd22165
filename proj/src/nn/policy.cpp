#include "safe_rl/nn/policy.hpp"

#include <algorithm>

namespace safe_rl::nn {

GaussianPolicy::GaussianPolicy(MlpSpec mlp, int action_dim, double log_var_min, double log_var_max)
    : mlp_(std::move(mlp)), action_dim_(action_dim), log_var_min_(log_var_min), log_var_max_(log_var_max) {
  mlp_.validate();
  require(action_dim_ > 0, ErrorCode::kInvalidArgument, "action dimension must be positive");
  require(log_var_min_ < log_var_max_, ErrorCode::kInvalidArgument, "empty log-variance range");
  require(mlp_.head != OutputHead::kScalar, ErrorCode::kInvalidArgument,
          "Gaussian policy needs a mean head");
  const int expected = state_dependent_variance() ? 2 * action_dim_ : action_dim_;
  require_same_size(mlp_.output_dim(), expected, "policy MLP output size");
}

Eigen::Index GaussianPolicy::param_count() const {
  return mlp_.param_count() + (state_dependent_variance() ? 0 : action_dim_);
}

ParamVector GaussianPolicy::init(Rng& rng, double initial_log_var) const {
  ParamVector p = init_mlp(mlp_, rng);
  if (state_dependent_variance()) {
    // Bias of the log-variance half sets the starting spread.
    p.block(p.layout.size() - 1).bottomRows(action_dim_).setConstant(initial_log_var);
    return p;
  }
  ParamVector lv{Eigen::VectorXd::Constant(action_dim_, initial_log_var),
                 {ParamSlice{"log_var", 0, action_dim_, 1}}};
  return concat(p, lv, "");
}

namespace {

Eigen::MatrixXd raw_log_var(const GaussianPolicy& pol, const Eigen::VectorXd& params,
                            const Eigen::MatrixXd& out) {
  const int d = pol.action_dim();
  if (pol.state_dependent_variance()) return out.bottomRows(d);
  return params.tail(d).replicate(1, out.cols());
}

}  // namespace

GaussianBatch GaussianPolicy::distribution(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                                           MlpTape* tape) const {
  require_same_size(params.size(), param_count(), "policy parameter count");
  require(states.allFinite(), ErrorCode::kNumerical, "non-finite state");
  const Eigen::MatrixXd out = mlp_forward(mlp_, params.head(mlp_.param_count()), states, tape);
  GaussianBatch b;
  b.mean = out.topRows(action_dim_);
  b.log_var = raw_log_var(*this, params, out).cwiseMax(log_var_min_).cwiseMin(log_var_max_);
  return b;
}

Eigen::VectorXd GaussianPolicy::log_prob(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                                         const Eigen::MatrixXd& actions) const {
  require_same_size(actions.rows(), action_dim_, "action dimension");
  require_same_size(actions.cols(), states.cols(), "action batch");
  require(actions.allFinite(), ErrorCode::kNumerical, "non-finite action");
  const GaussianBatch b = distribution(params, states);
  Eigen::VectorXd lp(states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    lp[i] = diag_gaussian_log_density<double>(b.mean.col(i), b.log_var.col(i), actions.col(i));
  }
  return lp;
}

double GaussianPolicy::log_prob(const Eigen::VectorXd& params, const Eigen::VectorXd& state,
                                const Eigen::VectorXd& action) const {
  return log_prob(params, Eigen::MatrixXd(state), Eigen::MatrixXd(action))[0];
}

Eigen::VectorXd GaussianPolicy::backward(const Eigen::VectorXd& params, const MlpTape& tape,
                                         const GaussianBatch& dist, const Eigen::MatrixXd& grad_mean,
                                         const Eigen::MatrixXd& grad_log_var) const {
  (void)dist;
  const Eigen::MatrixXd& out = tape.pre_activations.back();
  const Eigen::MatrixXd raw = raw_log_var(*this, params, out);
  // The clamp passes gradient only inside the range.
  const Eigen::MatrixXd g_lv =
      grad_log_var.cwiseProduct(((raw.array() >= log_var_min_) && (raw.array() <= log_var_max_))
                                    .cast<double>()
                                    .matrix());
  Eigen::VectorXd grad(param_count());
  const Eigen::Index np = mlp_.param_count();
  if (state_dependent_variance()) {
    Eigen::MatrixXd og(2 * action_dim_, out.cols());
    og << grad_mean, g_lv;
    grad = mlp_backward(mlp_, params.head(np), tape, og).params;
  } else {
    grad.head(np) = mlp_backward(mlp_, params.head(np), tape, grad_mean).params;
    grad.tail(action_dim_) = g_lv.rowwise().sum();
  }
  return grad;
}

Eigen::VectorXd GaussianPolicy::log_prob_grad(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                                              const Eigen::MatrixXd& actions,
                                              const Eigen::VectorXd& weights) const {
  require_same_size(actions.cols(), states.cols(), "action batch");
  require_same_size(weights.size(), states.cols(), "weight count");
  MlpTape tape;
  const GaussianBatch b = distribution(params, states, &tape);
  const Eigen::ArrayXXd inv_var = (-b.log_var.array()).exp();
  const Eigen::ArrayXXd z = actions.array() - b.mean.array();
  const Eigen::RowVectorXd w = weights.transpose();
  const Eigen::MatrixXd gm = ((z * inv_var).matrix().array().rowwise() * w.array()).matrix();
  const Eigen::MatrixXd glv = ((0.5 * (z * z * inv_var - 1.0)).rowwise() * w.array()).matrix();
  return backward(params, tape, b, gm, glv);
}

Eigen::MatrixXd GaussianPolicy::scores(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                                       const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd s(param_count(), states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    s.col(i) = log_prob_grad(params, states.col(i), actions.col(i), Eigen::VectorXd::Ones(1));
  }
  return s;
}

double GaussianPolicy::mean_kl(const Eigen::VectorXd& old_params, const Eigen::VectorXd& params,
                               const Eigen::MatrixXd& states, Eigen::VectorXd* grad) const {
  require(states.cols() > 0, ErrorCode::kInvalidArgument, "KL needs at least one state");
  const GaussianBatch p = distribution(old_params, states);
  MlpTape tape;
  const GaussianBatch q = distribution(params, states, &tape);
  const double n = static_cast<double>(states.cols());
  double kl = 0.0;
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    kl += kl_diag_gaussian<double>(p.mean.col(i), p.stddev().col(i), q.mean.col(i), q.stddev().col(i));
  }
  if (grad) {
    const Eigen::ArrayXXd inv_var_q = (-q.log_var.array()).exp();
    const Eigen::ArrayXXd diff = q.mean.array() - p.mean.array();
    const Eigen::MatrixXd gm = (diff * inv_var_q / n).matrix();
    const Eigen::MatrixXd glv =
        ((0.5 - 0.5 * (p.log_var.array().exp() + diff * diff) * inv_var_q) / n).matrix();
    *grad = backward(params, tape, q, gm, glv);
  }
  return kl / n;
}

Eigen::VectorXd GaussianPolicy::sample(const Eigen::VectorXd& params, const Eigen::VectorXd& state,
                                       Rng& rng) const {
  const GaussianBatch b = distribution(params, Eigen::MatrixXd(state));
  return b.mean.col(0) + b.stddev().col(0).cwiseProduct(gaussian_vector(rng, action_dim_, 1.0));
}

Eigen::VectorXd GaussianPolicy::mode(const Eigen::VectorXd& params, const Eigen::VectorXd& state) const {
  return distribution(params, Eigen::MatrixXd(state)).mean.col(0);
}

TabularSoftmaxPolicy::TabularSoftmaxPolicy(int n_states, int n_actions)
    : n_states_(n_states), n_actions_(n_actions) {
  require(n_states > 0 && n_actions > 0, ErrorCode::kInvalidArgument, "empty tabular policy");
}

Eigen::MatrixXd TabularSoftmaxPolicy::probabilities(const Eigen::VectorXd& params) const {
  require_same_size(params.size(), param_count(), "tabular policy parameters");
  Eigen::MatrixXd probs(n_states_, n_actions_);
  for (int x = 0; x < n_states_; ++x) {
    const Eigen::VectorXd logits = params.segment(static_cast<Eigen::Index>(x) * n_actions_, n_actions_);
    const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
    probs.row(x) = (e / e.sum()).matrix().transpose();
  }
  return probs;
}

double TabularSoftmaxPolicy::log_prob(const Eigen::VectorXd& params, int state, int action) const {
  const Eigen::VectorXd logits = params.segment(static_cast<Eigen::Index>(state) * n_actions_, n_actions_);
  const double mx = logits.maxCoeff();
  return logits[action] - mx - std::log((logits.array() - mx).exp().sum());
}

void TabularSoftmaxPolicy::accumulate_score(const Eigen::VectorXd& params, int state, int action,
                                            double weight, Eigen::VectorXd& grad) const {
  const Eigen::Index off = static_cast<Eigen::Index>(state) * n_actions_;
  const Eigen::VectorXd logits = params.segment(off, n_actions_);
  const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
  grad.segment(off, n_actions_) -= weight * (e / e.sum()).matrix();
  grad[off + action] += weight;
}

int TabularSoftmaxPolicy::sample(const Eigen::VectorXd& params, int state, Rng& rng) const {
  const Eigen::MatrixXd probs = probabilities(params);
  const double u = uniform(rng, 0.0, 1.0);
  double acc = 0.0;
  for (int a = 0; a < n_actions_; ++a) {
    acc += probs(state, a);
    if (u < acc) return a;
  }
  return n_actions_ - 1;
}

}  // namespace safe_rl::nn
