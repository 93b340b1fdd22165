#pragma once

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"
#include "safe_rl/nn/policy.hpp"

namespace safe_rl::nn {

struct CgOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 200;
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = true;  // false: best iterate returned, tolerance not met
};

// Solves (S S^T / n + damping I) x = grad, where the columns of S are score
// vectors. With fewer columns than rows the Woodbury identity gives the exact
// solution from an n x n factorization; otherwise conjugate gradient runs
// without multiplying S out.
CgResult fisher_system_solve(const Eigen::MatrixXd& scores, const Eigen::VectorXd& grad, double damping,
                             const CgOptions& options = {});

// Factors the system once for repeated solves against the same scores.
class FisherSolver {
 public:
  FisherSolver(Eigen::MatrixXd scores, double damping, CgOptions options = {});
  CgResult solve(const Eigen::VectorXd& grad) const;

 private:
  Eigen::MatrixXd scores_;
  double damping_;
  CgOptions options_;
  bool woodbury_;
  Eigen::MatrixXd small_factor_;  // lower Cholesky factor of n d I + S^T S
};

// Builds scores from one action sampled per state under the policy itself.
CgResult fisher_system_solve(const GaussianPolicy& policy, const Eigen::VectorXd& params,
                             const Eigen::MatrixXd& states, const Eigen::VectorXd& grad, double damping,
                             Rng& rng, const CgOptions& options = {});

// Fisher-vector product (S S^T / n + damping I) v.
Eigen::VectorXd fisher_vector_product(const Eigen::MatrixXd& scores, const Eigen::VectorXd& v,
                                      double damping);

}  // namespace safe_rl::nn
