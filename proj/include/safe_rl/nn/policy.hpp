#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "safe_rl/common/error.hpp"
#include "safe_rl/common/rng.hpp"
#include "safe_rl/nn/mlp.hpp"
#include "safe_rl/nn/param_vector.hpp"

namespace safe_rl::nn {

// KL(N(mean1, diag std1^2) || N(mean2, diag std2^2)), closed form.
template <typename Scalar>
Scalar kl_diag_gaussian(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mean1,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& std1,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mean2,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& std2) {
  require_same_size(mean1.size(), std1.size(), "kl: mean1/std1");
  require_same_size(mean1.size(), mean2.size(), "kl: mean1/mean2");
  require_same_size(mean2.size(), std2.size(), "kl: mean2/std2");
  require((std1.array() > Scalar(0)).all() && (std2.array() > Scalar(0)).all(),
          ErrorCode::kInvalidArgument, "kl: standard deviations must be positive");
  Scalar kl(0);
  for (Eigen::Index i = 0; i < mean1.size(); ++i) {
    const Scalar r = std1[i] / std2[i];
    const Scalar z = (mean1[i] - mean2[i]) / std2[i];
    kl += -std::log(r) + (r * r + z * z - Scalar(1)) / Scalar(2);
  }
  return kl < Scalar(0) ? Scalar(0) : kl;  // guard rounding, exact 0 for equal inputs
}

// Diagonal Gaussian log-density of `action`.
template <typename Scalar>
Scalar diag_gaussian_log_density(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mean,
                                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& log_var,
                                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& action) {
  const Scalar log2pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  Scalar lp(0);
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const Scalar z = action[i] - mean[i];
    lp -= (log2pi + log_var[i] + z * z * std::exp(-log_var[i])) / Scalar(2);
  }
  return lp;
}

// Per-column Gaussian parameters; each matrix is action_dim x batch.
struct GaussianBatch {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_var;  // after clamping

  Eigen::MatrixXd stddev() const { return (0.5 * log_var.array()).exp().matrix(); }
};

// Diagonal Gaussian actor. The MLP either emits [mean; log-variance]
// (kMeanLogVariance head) or just the mean (kMean head), in which case a
// state-independent log-variance vector follows the MLP weights in the
// parameter array. Actions are unbounded here; environments clamp.
class GaussianPolicy {
 public:
  GaussianPolicy(MlpSpec mlp, int action_dim, double log_var_min = -5.0, double log_var_max = 2.0);

  const MlpSpec& mlp() const { return mlp_; }
  int action_dim() const { return action_dim_; }
  int obs_dim() const { return mlp_.input_dim(); }
  bool state_dependent_variance() const { return mlp_.head == OutputHead::kMeanLogVariance; }
  double log_var_min() const { return log_var_min_; }
  double log_var_max() const { return log_var_max_; }
  Eigen::Index param_count() const;

  ParamVector init(Rng& rng, double initial_log_var = 0.0) const;

  GaussianBatch distribution(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                             MlpTape* tape = nullptr) const;

  Eigen::VectorXd log_prob(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                           const Eigen::MatrixXd& actions) const;
  double log_prob(const Eigen::VectorXd& params, const Eigen::VectorXd& state,
                  const Eigen::VectorXd& action) const;

  // Gradient of sum_i weights_i * log pi(actions_i | states_i).
  Eigen::VectorXd log_prob_grad(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                                const Eigen::MatrixXd& actions, const Eigen::VectorXd& weights) const;

  // Score vectors grad log pi, one column per sample (param_count x batch).
  Eigen::MatrixXd scores(const Eigen::VectorXd& params, const Eigen::MatrixXd& states,
                         const Eigen::MatrixXd& actions) const;

  // Mean over states of KL(pi_old(.|x) || pi(.|x)); gradient w.r.t. params if requested.
  double mean_kl(const Eigen::VectorXd& old_params, const Eigen::VectorXd& params,
                 const Eigen::MatrixXd& states, Eigen::VectorXd* grad = nullptr) const;

  // Gradient of sum_i out_grad_mean_i . mean_i + out_grad_logvar_i . log_var_i.
  Eigen::VectorXd backward(const Eigen::VectorXd& params, const MlpTape& tape,
                           const GaussianBatch& dist, const Eigen::MatrixXd& grad_mean,
                           const Eigen::MatrixXd& grad_log_var) const;

  Eigen::VectorXd sample(const Eigen::VectorXd& params, const Eigen::VectorXd& state, Rng& rng) const;
  Eigen::VectorXd mode(const Eigen::VectorXd& params, const Eigen::VectorXd& state) const;

 private:
  MlpSpec mlp_;
  int action_dim_;
  double log_var_min_;
  double log_var_max_;
};

// Tabular softmax policy over n states x m actions; params are the logits,
// row-major by state.
class TabularSoftmaxPolicy {
 public:
  TabularSoftmaxPolicy(int n_states, int n_actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  Eigen::Index param_count() const { return static_cast<Eigen::Index>(n_states_) * n_actions_; }

  Eigen::MatrixXd probabilities(const Eigen::VectorXd& params) const;
  double log_prob(const Eigen::VectorXd& params, int state, int action) const;
  // Adds weight * grad log pi(action|state) into grad.
  void accumulate_score(const Eigen::VectorXd& params, int state, int action, double weight,
                        Eigen::VectorXd& grad) const;
  int sample(const Eigen::VectorXd& params, int state, Rng& rng) const;

 private:
  int n_states_;
  int n_actions_;
};

}  // namespace safe_rl::nn
