#include "safe_rl/cmdp/spi.hpp"

#include <cmath>
#include <limits>

#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

Eigen::RowVectorXd solve_action_simplex_lp(const Eigen::RowVectorXd& q_cost,
                                           const Eigen::RowVectorXd& q_lyap, double budget,
                                           const Eigen::RowVectorXd& incumbent) {
  const Eigen::Index m = q_cost.size();
  require_same_size(q_lyap.size(), m, "Lyapunov action values");
  require_same_size(incumbent.size(), m, "incumbent row");

  double best = std::numeric_limits<double>::infinity();
  Eigen::Index lo = -1, hi = -1;
  double mix = 0.0;  // mass on `hi`
  for (Eigen::Index i = 0; i < m; ++i) {
    if (q_lyap(i) <= budget && q_cost(i) < best) {
      best = q_cost(i);
      lo = i;
      hi = i;
      mix = 0.0;
    }
  }
  require(lo >= 0, ErrorCode::kInvariantViolation, "per-state Lyapunov LP is infeasible");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (q_lyap(i) > budget) continue;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (q_lyap(j) <= budget || q_cost(j) >= q_cost(i)) continue;
      const double p = (budget - q_lyap(i)) / (q_lyap(j) - q_lyap(i));
      const double value = (1.0 - p) * q_cost(i) + p * q_cost(j);
      if (value < best) {
        best = value;
        lo = i;
        hi = j;
        mix = p;
      }
    }
  }

  if (incumbent.dot(q_lyap) <= budget && incumbent.dot(q_cost) <= best + 1e-12) return incumbent;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
  row(lo) += 1.0 - mix;
  row(hi) += mix;
  return row;
}

namespace {

Eigen::VectorXd auxiliary_cost(const TabularCmdp& cmdp, const TabularPolicy& baseline,
                               EpsilonMode mode) {
  if (mode == EpsilonMode::kConstant) {
    return Eigen::VectorXd::Constant(cmdp.n_states, epsilon_constant(cmdp, baseline));
  }
  return epsilon_state_dependent(cmdp, baseline);
}

}  // namespace

TabularPolicy spi_step(const TabularCmdp& cmdp, const TabularPolicy& current, EpsilonMode mode) {
  check_compatible(cmdp, current);
  const Eigen::MatrixXd c = cost_matrix(cmdp, CostKind::kCost);
  const Eigen::MatrixXd q_cost = action_values(cmdp, c, policy_evaluate(cmdp, current, c));

  TabularPolicy next{Eigen::MatrixXd::Zero(cmdp.n_states, cmdp.n_actions)};
  if (!cmdp.constrained()) {
    // No threshold: plain greedy improvement.
    for (int x = 0; x < cmdp.n_states; ++x) {
      const Eigen::RowVectorXd unbounded =
          Eigen::RowVectorXd::Constant(cmdp.n_actions, 0.0);
      next.probs.row(x) = solve_action_simplex_lp(q_cost.row(x), unbounded, 0.0,
                                                  current.probs.row(x));
    }
    return next;
  }

  const LyapunovBundle lyap = lyapunov_bundle(cmdp, current, auxiliary_cost(cmdp, current, mode));
  for (int x = 0; x < cmdp.n_states; ++x) {
    // sum_a (pi - pi_B) QL <= eps  <=>  QL^T pi <= eps + QL^T pi_B
    const double budget = lyap.epsilon(x) + current.probs.row(x).dot(lyap.QL.row(x));
    next.probs.row(x) =
        solve_action_simplex_lp(q_cost.row(x), lyap.QL.row(x), budget, current.probs.row(x));
  }
  return next;
}

SpiResult spi_run(const TabularCmdp& cmdp, const TabularPolicy& initial, int max_iters,
                  double tol, EpsilonMode mode) {
  check_compatible(cmdp, initial);
  require(max_iters >= 0, ErrorCode::kInvalidArgument, "max_iters must be nonnegative");

  auto snapshot = [&](int k, const TabularPolicy& pi) {
    SpiIterate it;
    it.iteration = k;
    it.cost = policy_evaluate(cmdp, pi, CostKind::kCost)(cmdp.x0);
    it.constraint = policy_evaluate(cmdp, pi, CostKind::kConstraint)(cmdp.x0);
    return it;
  };

  SpiResult result{initial, {snapshot(0, initial)}, false};
  if (cmdp.constrained() && result.log[0].constraint > cmdp.d0 + 1e-12 * (1.0 + cmdp.d0)) {
    throw Error(ErrorCode::kInfeasibleBaseline, "initial policy violates the constraint");
  }
  for (int k = 1; k <= max_iters; ++k) {
    if (cmdp.constrained()) {
      result.log.back().epsilon_sum = auxiliary_cost(cmdp, result.policy, mode).sum();
    }
    TabularPolicy next = spi_step(cmdp, result.policy, mode);
    SpiIterate it = snapshot(k, next);
    const double improvement = result.log.back().cost - it.cost;
    result.policy = std::move(next);
    result.log.push_back(it);
    if (improvement < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace safe_rl::cmdp
