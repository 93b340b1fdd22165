#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"

namespace safe_rl::cmdp {

// Finite constrained MDP (X, A, gamma, c, P, x0, d, d0).
//
// Transitions are stored as one (|X||A|) x |X| matrix; row x*|A| + a holds
// P(.|x, a). A threshold of +infinity means "unconstrained".
struct TabularCmdp {
  int n_states = 0;
  int n_actions = 0;
  Eigen::MatrixXd transition;
  Eigen::MatrixXd cost;             // |X| x |A|
  Eigen::VectorXd constraint_cost;  // |X|
  double gamma = 0.9;
  int x0 = 0;
  double d0 = std::numeric_limits<double>::infinity();

  Eigen::Index row(int x, int a) const { return static_cast<Eigen::Index>(x) * n_actions + a; }
  auto next_state_probs(int x, int a) const { return transition.row(row(x, a)); }

  double c_max() const;
  double d_max() const;
  bool constrained() const { return d0 < std::numeric_limits<double>::infinity(); }

  // Throws Error{kInvalidArgument | kDimensionMismatch} when any invariant fails.
  void validate() const;
};

// Stationary Markov policy; row x is pi(.|x).
struct TabularPolicy {
  Eigen::MatrixXd probs;

  int n_states() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }

  static TabularPolicy uniform(int n_states, int n_actions);
  static TabularPolicy deterministic(const std::vector<int>& actions, int n_actions);

  void validate(double tol = 1e-12) const;
};

enum class CostKind { kCost, kConstraint };

// h(x, a) for the requested signal; the constraint cost is broadcast over actions.
Eigen::MatrixXd cost_matrix(const TabularCmdp& cmdp, CostKind which);

// P_pi(x, x') = sum_a pi(a|x) P(x'|x, a).
Eigen::MatrixXd policy_transition(const TabularCmdp& cmdp, const TabularPolicy& policy);

// h_pi(x) = sum_a pi(a|x) h(x, a).
Eigen::VectorXd policy_cost(const TabularPolicy& policy, const Eigen::MatrixXd& h);

void check_compatible(const TabularCmdp& cmdp, const TabularPolicy& policy);

// Dirichlet(1) transitions, U[0,1] costs and constraint costs, x0 = 0, no threshold.
TabularCmdp random_cmdp(int n_states, int n_actions, double gamma, Rng& rng);

// Random stochastic policy with rows drawn from Dirichlet(1).
TabularPolicy random_policy(int n_states, int n_actions, Rng& rng);

struct FeasibleInstance {
  TabularCmdp cmdp;
  TabularPolicy initial;
};

// Random CMDP plus a random policy that is feasible for it: the threshold is
// set to D_initial(x0) * (1 + 0.1 u), u ~ U[0, 1].
FeasibleInstance random_feasible_instance(int n_states, int n_actions, double gamma, Rng& rng);

std::string to_json(const TabularCmdp& cmdp, int indent = 2);
TabularCmdp cmdp_from_json(const std::string& text);
TabularCmdp load_cmdp(const std::string& path);
void save_cmdp(const TabularCmdp& cmdp, const std::string& path);

std::string to_json(const TabularPolicy& policy, int indent = 2);
TabularPolicy policy_from_json(const std::string& text);

}  // namespace safe_rl::cmdp
