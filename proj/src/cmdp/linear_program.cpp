#include "safe_rl/cmdp/linear_program.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

namespace {

class Tableau {
 public:
  // Columns: [structural | slack | artificial | rhs]; last row is the objective.
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::Index n_struct_slack)
      : rows_(a.rows()), cols_(n_struct_slack + a.rows()), first_artificial_(n_struct_slack) {
    t_ = Eigen::MatrixXd::Zero(rows_ + 1, cols_ + 1);
    t_.topLeftCorner(rows_, n_struct_slack) = a;
    t_.block(0, n_struct_slack, rows_, rows_).setIdentity();
    t_.col(cols_).head(rows_) = b;
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = n_struct_slack + i;
  }

  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double cb = t_(rows_, basis_[i]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  // Returns false when unbounded.
  bool optimize(bool allow_artificial, double tol, int& pivots) {
    const Eigen::Index limit = allow_artificial ? cols_ : first_artificial_;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (t_(rows_, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (t_(i, enter) > tol) {
          const double ratio = t_(i, cols_) / t_(i, enter);
          if (ratio < best_ratio - tol ||
              (std::abs(ratio - best_ratio) <= tol && basis_[i] < basis_[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }

  // Moves zero-level artificials out of the basis where possible.
  void expel_artificials(double tol) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      for (Eigen::Index j = 0; j < first_artificial_; ++j) {
        if (std::abs(t_(i, j)) > tol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective_value() const { return -t_(rows_, cols_); }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  double rhs(Eigen::Index i) const { return t_(i, cols_); }
  Eigen::Index first_artificial() const { return first_artificial_; }

 private:
  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::Index first_artificial_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  const Eigen::Index n = lp.objective.size();
  const Eigen::Index m_eq = lp.a_eq.rows();
  const Eigen::Index m_ub = lp.a_ub.rows();
  if (m_eq > 0) require_same_size(lp.a_eq.cols(), n, "A_eq columns");
  if (m_ub > 0) require_same_size(lp.a_ub.cols(), n, "A_ub columns");
  require_same_size(lp.b_eq.size(), m_eq, "b_eq");
  require_same_size(lp.b_ub.size(), m_ub, "b_ub");

  const Eigen::Index rows = m_eq + m_ub;
  const Eigen::Index n_std = n + m_ub;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n_std);
  Eigen::VectorXd b(rows);
  if (m_eq > 0) a.topLeftCorner(m_eq, n) = lp.a_eq;
  if (m_ub > 0) {
    a.block(m_eq, 0, m_ub, n) = lp.a_ub;
    a.block(m_eq, n, m_ub, m_ub).setIdentity();
  }
  b << lp.b_eq, lp.b_ub;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (b(i) < 0.0) {
      a.row(i) *= -1.0;
      b(i) *= -1.0;
    }
  }

  LpSolution sol;
  Tableau tab(a, b, n_std);

  // Phase 1: drive the artificials to zero.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_std + rows);
  phase1.tail(rows).setOnes();
  tab.set_objective(phase1);
  tab.optimize(true, tol, sol.pivots);
  if (tab.objective_value() > 1e3 * tol * (1.0 + b.lpNorm<1>())) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  tab.expel_artificials(1e-9);

  // Phase 2.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_std + rows);
  phase2.head(n) = lp.objective;
  tab.set_objective(phase2);
  if (!tab.optimize(false, tol, sol.pivots)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  Eigen::VectorXd x_std = Eigen::VectorXd::Zero(n_std);
  const auto& basis = tab.basis();
  bool clean_basis = true;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (basis[i] >= tab.first_artificial()) {
      clean_basis = false;
    } else {
      x_std(basis[i]) = tab.rhs(i);
    }
  }
  if (clean_basis && rows > 0) {
    Eigen::MatrixXd basis_matrix(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) basis_matrix.col(i) = a.col(basis[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(b);
      for (Eigen::Index i = 0; i < rows; ++i) x_std(basis[i]) = std::max(xb(i), 0.0);
    }
  }
  sol.x = x_std.head(n);
  sol.value = lp.objective.dot(sol.x);
  sol.status = LpStatus::kOptimal;
  return sol;
}

}  // namespace safe_rl::cmdp
