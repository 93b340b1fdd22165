#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library's linear-solve paths.

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "safe_rl/cmdp/tabular_cmdp.hpp"

namespace fixtures {

using safe_rl::cmdp::TabularCmdp;
using safe_rl::cmdp::TabularPolicy;

inline TabularCmdp one_state(const Eigen::RowVectorXd& costs, double d, double gamma, double d0) {
  TabularCmdp m;
  m.n_states = 1;
  m.n_actions = static_cast<int>(costs.size());
  m.transition = Eigen::MatrixXd::Ones(m.n_actions, 1);
  m.cost = costs;
  m.constraint_cost = Eigen::VectorXd::Constant(1, d);
  m.gamma = gamma;
  m.d0 = d0;
  return m;
}

// x0 -> x1 -> x1 -> ..., single action.
inline TabularCmdp two_state_chain(double gamma) {
  TabularCmdp m;
  m.n_states = 2;
  m.n_actions = 1;
  m.transition.resize(2, 2);
  m.transition << 0, 1, 0, 1;
  m.cost = Eigen::MatrixXd::Ones(2, 1);
  m.constraint_cost = Eigen::VectorXd::Ones(2);
  m.gamma = gamma;
  return m;
}

// Fixed-policy value iteration until the sup-norm residual drops below tol.
inline Eigen::VectorXd value_iteration(const TabularCmdp& m, const TabularPolicy& pi,
                                       const Eigen::MatrixXd& h, double tol = 1e-13) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m.n_states);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(m.n_states);
    for (int x = 0; x < m.n_states; ++x) {
      for (int a = 0; a < m.n_actions; ++a) {
        double backup = h(x, a);
        for (int y = 0; y < m.n_states; ++y) backup += m.gamma * m.transition(x * m.n_actions + a, y) * v(y);
        next(x) += pi.probs(x, a) * backup;
      }
    }
    const double residual = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (residual < tol) break;
  }
  return v;
}

// Unconstrained optimal value by Bellman optimality iteration.
inline Eigen::VectorXd optimal_value_iteration(const TabularCmdp& m, double tol = 1e-13) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m.n_states);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd next(m.n_states);
    for (int x = 0; x < m.n_states; ++x) {
      double best = 1e300;
      for (int a = 0; a < m.n_actions; ++a) {
        double backup = m.cost(x, a);
        for (int y = 0; y < m.n_states; ++y) backup += m.gamma * m.transition(x * m.n_actions + a, y) * v(y);
        best = std::min(best, backup);
      }
      next(x) = best;
    }
    const double residual = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (residual < tol) break;
  }
  return v;
}

inline double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace fixtures
