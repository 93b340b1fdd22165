#pragma once

#include <Eigen/Core>

namespace safe_rl::cmdp {

// min c^T x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
// Either constraint block may be empty (zero rows).
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  int pivots = 0;
};

// Dense two-phase tableau simplex with Bland's anti-cycling rule. Meant for
// small instances (tens of variables); the final basic solution is
// re-solved with a full-pivot LU to clean up accumulated round-off.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-11);

}  // namespace safe_rl::cmdp
