#pragma once

#include <vector>

#include <Eigen/Core>

#include "safe_rl/cmdp/lyapunov.hpp"
#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace safe_rl::cmdp {

enum class EpsilonMode { kConstant, kStateDependent };

// min_p q_cost^T p  s.t.  q_lyap^T p <= budget,  p on the simplex.
//
// The optimum of an LP with one linear constraint over the simplex sits on a
// vertex with at most two nonzero actions, so it is found exactly by scanning
// single actions and budget-tight pairs. If `incumbent` already attains the
// optimal value (within 1e-12) it is returned unchanged.
// Throws kInvariantViolation when no action satisfies the budget.
Eigen::RowVectorXd solve_action_simplex_lp(const Eigen::RowVectorXd& q_cost,
                                           const Eigen::RowVectorXd& q_lyap, double budget,
                                           const Eigen::RowVectorXd& incumbent);

// One safe policy improvement step with pi_B = current.
TabularPolicy spi_step(const TabularCmdp& cmdp, const TabularPolicy& current,
                       EpsilonMode mode = EpsilonMode::kStateDependent);

struct SpiIterate {
  int iteration = 0;
  double cost = 0.0;        // C_pi(x0)
  double constraint = 0.0;  // D_pi(x0)
  double epsilon_sum = 0.0;
};

struct SpiResult {
  TabularPolicy policy;
  std::vector<SpiIterate> log;  // log[0] is the initial policy
  bool converged = false;
};

// Iterates spi_step until the improvement of C(x0) drops below tol.
// Throws kInfeasibleBaseline when the initial policy violates the threshold.
SpiResult spi_run(const TabularCmdp& cmdp, const TabularPolicy& initial, int max_iters,
                  double tol, EpsilonMode mode = EpsilonMode::kStateDependent);

}  // namespace safe_rl::cmdp
