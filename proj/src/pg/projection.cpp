#include "safe_rl/pg/projection.hpp"

#include <atomic>
#include <cmath>

#include "safe_rl/common/error.hpp"

namespace safe_rl::pg {

namespace {
std::atomic<bool> g_sign_fault{false};
}

namespace testing {
void set_projection_sign_fault(bool on) { g_sign_fault = on; }
bool projection_sign_fault() { return g_sign_fault; }
}  // namespace testing

ProjectionResult safety_layer_project(const Eigen::VectorXd& action_unc, const Eigen::VectorXd& baseline,
                                      const Eigen::VectorXd& g, double epsilon) {
  require_same_size(action_unc.size(), baseline.size(), "projection: action vs baseline");
  require_same_size(action_unc.size(), g.size(), "projection: action vs gradient");
  require(action_unc.allFinite() && baseline.allFinite() && g.allFinite() && std::isfinite(epsilon),
          ErrorCode::kNumerical, "projection: non-finite input");
  ProjectionResult r;
  r.action = action_unc;
  const double gg = g.squaredNorm();
  if (std::sqrt(gg) < kDegenerateNorm) {
    r.degenerate = true;
    return r;
  }
  const double gap = g.dot(action_unc - baseline);
  // Points already on the plane up to rounding count as feasible, so projecting twice is a no-op.
  const double tol = kFeasibilityTolerance * (1.0 + std::abs(gap) + std::abs(epsilon));
  const double lambda = (gap - epsilon) / gg;
  if (gap - epsilon > tol) {
    r.multiplier = lambda;
    r.active = true;
    r.action = g_sign_fault ? Eigen::VectorXd(action_unc + lambda * g) : Eigen::VectorXd(action_unc - lambda * g);
  }
  return r;
}

ProjectionResult safety_layer_project_gaussian(const Eigen::VectorXd& mean_unc, const Eigen::VectorXd& std_unc,
                                               const Eigen::VectorXd& baseline, const Eigen::VectorXd& g,
                                               double epsilon, double k, double std_floor) {
  require_same_size(mean_unc.size(), std_unc.size(), "projection: mean vs stddev");
  require((std_unc.array() > 0.0).all(), ErrorCode::kInvalidArgument, "projection: stddev must be positive");
  require(k >= 0.0 && std_floor > 0.0, ErrorCode::kInvalidArgument, "projection: bad k or floor");
  ProjectionResult r = safety_layer_project(mean_unc, baseline, g, epsilon);
  r.stddev = std_unc;
  if (r.degenerate) return r;
  const double spread = k * g.cwiseAbs().dot(std_unc);
  const double slack = std::max(epsilon - g.dot(r.action - baseline), 0.0);
  if (spread <= slack) return r;
  const double scale = slack / spread;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] == 0.0) continue;
    const double s = scale * std_unc[i];
    r.floor_hit = r.floor_hit || s < std_floor;
    r.stddev[i] = std::max(s, std_floor);
  }
  return r;
}

Eigen::VectorXd project_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& g, bool active) {
  if (!active) return v;
  return v - g * (g.dot(v) / g.squaredNorm());
}

ThetaProjection theta_projection_multiplier(const Eigen::VectorXd& grad_c, const Eigen::VectorXd& grad_d,
                                            const HessianSolve& h_inverse, double epsilon, double beta) {
  require_same_size(grad_c.size(), grad_d.size(), "theta projection: gradients");
  require(beta > 0.0, ErrorCode::kInvalidArgument, "theta projection: beta must be positive");
  ThetaProjection tp;
  tp.hinv_grad_c = h_inverse(grad_c);
  if (grad_d.norm() < kDegenerateNorm) {
    tp.degenerate = true;
    return tp;
  }
  tp.hinv_grad_d = h_inverse(grad_d);
  const double denom = grad_d.dot(tp.hinv_grad_d);
  require(denom > 0.0, ErrorCode::kNumerical, "theta projection: H^-1 not positive definite");
  const double lambda = (-beta * epsilon - grad_c.dot(tp.hinv_grad_d)) / denom;
  tp.multiplier = lambda > 0.0 ? lambda : 0.0;
  return tp;
}

Eigen::VectorXd theta_projection_step(const ThetaProjection& tp, double alpha, double beta) {
  if (tp.multiplier == 0.0) return -(alpha / beta) * tp.hinv_grad_c;
  return -(alpha / beta) * (tp.hinv_grad_c + tp.multiplier * tp.hinv_grad_d);
}

Eigen::VectorXd safeguard_step(const HessianSolve& h_inverse, const Eigen::VectorXd& grad_d, double rate,
                               double beta) {
  require(beta > 0.0 && rate >= 0.0, ErrorCode::kInvalidArgument, "safeguard: bad rate or beta");
  if (rate == 0.0) return Eigen::VectorXd::Zero(grad_d.size());
  return -(rate / beta) * h_inverse(grad_d);
}

double tighten_threshold(double d0, double delta) {
  require(delta >= 0.0 && delta < 1.0, ErrorCode::kInvalidArgument, "tightening factor must lie in [0, 1)");
  return d0 * (1.0 - delta);
}

bool safeguard_triggered(double constraint_estimate, double d0, double margin) {
  return constraint_estimate > d0 * (1.0 + margin);
}

}  // namespace safe_rl::pg
