#pragma once

#include <functional>

#include <Eigen/Core>

namespace safe_rl::pg {

inline constexpr double kDegenerateNorm = 1e-12;
// Relative violation below which an action is treated as feasible.
inline constexpr double kFeasibilityTolerance = 1e-12;

struct ProjectionResult {
  Eigen::VectorXd action;  // projected action, or projected mean
  Eigen::VectorXd stddev;  // Gaussian variant only
  double multiplier = 0.0;
  bool active = false;
  bool degenerate = false;  // |g| below kDegenerateNorm, input returned unchanged
  bool floor_hit = false;   // Gaussian variant: some stddev clamped at the floor
};

// Euclidean projection of action_unc onto {a : g^T (a - baseline) <= epsilon}.
ProjectionResult safety_layer_project(const Eigen::VectorXd& action_unc, const Eigen::VectorXd& baseline,
                                      const Eigen::VectorXd& g, double epsilon);

// Mean projected as above; every stddev component with g_i != 0 is scaled by
// one common factor so that k * sum_i |g_i| std_i fits in the slack left by
// the projected mean, then floored.
ProjectionResult safety_layer_project_gaussian(const Eigen::VectorXd& mean_unc, const Eigen::VectorXd& std_unc,
                                               const Eigen::VectorXd& baseline, const Eigen::VectorXd& g,
                                               double epsilon, double k = 1.0, double std_floor = 1e-3);

// d(projected)/d(unprojected) applied to v, with g held fixed:
// (I - [active] g g^T / |g|^2) v.
Eigen::VectorXd project_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& g, bool active);

struct ThetaProjection {
  double multiplier = 0.0;
  bool degenerate = false;
  Eigen::VectorXd hinv_grad_c;  // H^-1 g_c
  Eigen::VectorXd hinv_grad_d;  // H^-1 g_d, empty when degenerate
};

using HessianSolve = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// lambda* = ((-beta eps - g_c^T H^-1 g_d) / (g_d^T H^-1 g_d))_+ for
// min g_c^T D + beta/2 D^T H D  s.t.  g_d^T D <= eps.
ThetaProjection theta_projection_multiplier(const Eigen::VectorXd& grad_c, const Eigen::VectorXd& grad_d,
                                            const HessianSolve& h_inverse, double epsilon, double beta);

// -(alpha / beta) H^-1 (g_c + lambda* g_d); exactly the unconstrained step when lambda* = 0.
Eigen::VectorXd theta_projection_step(const ThetaProjection& tp, double alpha, double beta);

// Pure descent on the constraint return: -(rate / beta) H^-1 g_d.
Eigen::VectorXd safeguard_step(const HessianSolve& h_inverse, const Eigen::VectorXd& grad_d, double rate,
                               double beta);

double tighten_threshold(double d0, double delta);

// Constraint estimate more than `margin` above d0.
bool safeguard_triggered(double constraint_estimate, double d0, double margin = 0.05);

namespace testing {
// Fault injection for the acceptance suite: flips the sign of the projection step.
void set_projection_sign_fault(bool on);
bool projection_sign_fault();
}  // namespace testing

}  // namespace safe_rl::pg
