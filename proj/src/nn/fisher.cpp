#include "safe_rl/nn/fisher.hpp"

#include <Eigen/Cholesky>

#include "safe_rl/common/error.hpp"

namespace safe_rl::nn {

Eigen::VectorXd fisher_vector_product(const Eigen::MatrixXd& scores, const Eigen::VectorXd& v,
                                      double damping) {
  const double n = static_cast<double>(scores.cols());
  Eigen::VectorXd out = damping * v;
  if (scores.cols() > 0) out.noalias() += scores * (scores.transpose() * v) / n;
  return out;
}

namespace {

CgResult conjugate_gradient(const Eigen::MatrixXd& scores, const Eigen::VectorXd& grad, double damping,
                            const CgOptions& options) {
  CgResult res;
  res.x = Eigen::VectorXd::Zero(grad.size());
  const double target = options.relative_tolerance * grad.norm();
  Eigen::VectorXd r = grad;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  res.residual_norm = std::sqrt(rr);
  Eigen::VectorXd best = res.x;
  double best_norm = res.residual_norm;
  while (res.residual_norm > target && res.iterations < options.max_iterations) {
    const Eigen::VectorXd ap = fisher_vector_product(scores, p, damping);
    const double alpha = rr / p.dot(ap);
    res.x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++res.iterations;
    res.residual_norm = std::sqrt(rr);
    if (res.residual_norm < best_norm) {
      best_norm = res.residual_norm;
      best = res.x;
    }
  }
  if (res.residual_norm > target) {
    res.converged = false;
    res.x = best;
    res.residual_norm = best_norm;
  }
  return res;
}

}  // namespace

FisherSolver::FisherSolver(Eigen::MatrixXd scores, double damping, CgOptions options)
    : scores_(std::move(scores)), damping_(damping), options_(options) {
  require(damping > 0.0, ErrorCode::kInvalidArgument, "damping must be positive");
  require(scores_.allFinite(), ErrorCode::kNumerical, "non-finite Fisher input");
  const Eigen::Index k = scores_.cols();
  woodbury_ = k > 0 && k < scores_.rows();
  if (woodbury_) {
    Eigen::MatrixXd small = Eigen::MatrixXd::Identity(k, k) * (static_cast<double>(k) * damping);
    small.selfadjointView<Eigen::Lower>().rankUpdate(scores_.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(small);
    require(llt.info() == Eigen::Success, ErrorCode::kNumerical, "Fisher Woodbury factorization failed");
    small_factor_ = llt.matrixL();
  }
}

CgResult FisherSolver::solve(const Eigen::VectorXd& grad) const {
  require_same_size(scores_.rows(), grad.size(), "score rows vs gradient");
  require(grad.allFinite(), ErrorCode::kNumerical, "non-finite Fisher input");
  if (!woodbury_) return conjugate_gradient(scores_, grad, damping_, options_);
  // Woodbury: (S S^T / n + d I)^-1 g = (g - S (n d I + S^T S)^-1 S^T g) / d.
  const auto l = small_factor_.triangularView<Eigen::Lower>();
  Eigen::VectorXd y = scores_.transpose() * grad;
  l.solveInPlace(y);
  l.transpose().solveInPlace(y);
  CgResult res;
  res.x = (grad - scores_ * y) / damping_;
  res.residual_norm = (grad - fisher_vector_product(scores_, res.x, damping_)).norm();
  return res;
}

CgResult fisher_system_solve(const Eigen::MatrixXd& scores, const Eigen::VectorXd& grad, double damping,
                             const CgOptions& options) {
  require_same_size(scores.rows(), grad.size(), "score rows vs gradient");
  return FisherSolver(scores, damping, options).solve(grad);
}

CgResult fisher_system_solve(const GaussianPolicy& policy, const Eigen::VectorXd& params,
                             const Eigen::MatrixXd& states, const Eigen::VectorXd& grad, double damping,
                             Rng& rng, const CgOptions& options) {
  Eigen::MatrixXd actions(policy.action_dim(), states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) actions.col(i) = policy.sample(params, states.col(i), rng);
  return fisher_system_solve(policy.scores(params, states, actions), grad, damping, options);
}

}  // namespace safe_rl::nn
