#pragma once

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace safe_rl::cmdp {

struct CmdpLpResult {
  double value = 0.0;           // optimal C(x0), undiscounted-sum convention
  TabularPolicy policy;         // rho(x, .) / sum_a rho(x, a); uniform where unvisited
  Eigen::MatrixXd occupancy;    // normalized rho(x, a), sums to 1
};

// Exact CMDP optimum through the occupancy-measure LP.
//
// The LP works with the normalized measure rho = (1 - gamma) * E[sum_t gamma^t 1{x_t=x, a_t=a}]:
//   sum_a rho(x,a) - gamma sum_{x',a'} P(x|x',a') rho(x',a') = (1 - gamma) 1{x = x0}
//   sum_{x,a} rho(x,a) d(x) <= (1 - gamma) d0        (dropped when d0 is infinite)
// and rescales the objective by 1/(1 - gamma) so the returned value matches
// policy_evaluate. Throws kInfeasible when no policy meets the threshold.
CmdpLpResult lp_optimal_cmdp(const TabularCmdp& cmdp);

}  // namespace safe_rl::cmdp
