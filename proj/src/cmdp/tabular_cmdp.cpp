#include "safe_rl/cmdp/tabular_cmdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/LU>
#include <json.hpp>

#include "safe_rl/common/error.hpp"

namespace safe_rl::cmdp {

using nlohmann::json;

double TabularCmdp::c_max() const { return cost.size() == 0 ? 0.0 : cost.maxCoeff(); }

double TabularCmdp::d_max() const {
  return constraint_cost.size() == 0 ? 0.0 : constraint_cost.maxCoeff();
}

void TabularCmdp::validate() const {
  require(n_states > 0 && n_actions > 0, ErrorCode::kInvalidArgument, "empty state or action set");
  require_same_size(transition.rows(), static_cast<long>(n_states) * n_actions, "transition rows");
  require_same_size(transition.cols(), n_states, "transition cols");
  require_same_size(cost.rows(), n_states, "cost rows");
  require_same_size(cost.cols(), n_actions, "cost cols");
  require_same_size(constraint_cost.size(), n_states, "constraint cost size");
  require(gamma >= 0.0 && gamma < 1.0, ErrorCode::kInvalidArgument, "gamma must lie in [0, 1)");
  require(x0 >= 0 && x0 < n_states, ErrorCode::kInvalidArgument, "x0 out of range");
  require(d0 >= 0.0, ErrorCode::kInvalidArgument, "d0 must be nonnegative");
  require(transition.allFinite() && (transition.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "transition probabilities must be finite and nonnegative");
  for (Eigen::Index r = 0; r < transition.rows(); ++r) {
    const double s = transition.row(r).sum();
    require(std::abs(s - 1.0) <= 1e-12, ErrorCode::kInvalidArgument,
            "transition row " + std::to_string(r) + " sums to " + std::to_string(s));
  }
  require(cost.allFinite() && (cost.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "costs must be finite and nonnegative");
  require(constraint_cost.allFinite() && (constraint_cost.array() >= 0.0).all(),
          ErrorCode::kInvalidArgument, "constraint costs must be finite and nonnegative");
}

TabularPolicy TabularPolicy::uniform(int n_states, int n_actions) {
  return {Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions)};
}

TabularPolicy TabularPolicy::deterministic(const std::vector<int>& actions, int n_actions) {
  TabularPolicy p{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions.size()), n_actions)};
  for (std::size_t x = 0; x < actions.size(); ++x) {
    require(actions[x] >= 0 && actions[x] < n_actions, ErrorCode::kInvalidArgument,
            "action index out of range");
    p.probs(static_cast<Eigen::Index>(x), actions[x]) = 1.0;
  }
  return p;
}

void TabularPolicy::validate(double tol) const {
  require(probs.allFinite() && (probs.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "policy probabilities must be finite and nonnegative");
  for (Eigen::Index x = 0; x < probs.rows(); ++x) {
    require(std::abs(probs.row(x).sum() - 1.0) <= tol, ErrorCode::kInvalidArgument,
            "policy row " + std::to_string(x) + " is not on the simplex");
  }
}

void check_compatible(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  require_same_size(policy.n_states(), cmdp.n_states, "policy states");
  require_same_size(policy.n_actions(), cmdp.n_actions, "policy actions");
}

Eigen::MatrixXd cost_matrix(const TabularCmdp& cmdp, CostKind which) {
  if (which == CostKind::kCost) return cmdp.cost;
  return cmdp.constraint_cost.replicate(1, cmdp.n_actions);
}

Eigen::MatrixXd policy_transition(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  check_compatible(cmdp, policy);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(cmdp.n_states, cmdp.n_states);
  for (int x = 0; x < cmdp.n_states; ++x) {
    for (int a = 0; a < cmdp.n_actions; ++a) {
      p.row(x) += policy.probs(x, a) * cmdp.next_state_probs(x, a);
    }
  }
  return p;
}

Eigen::VectorXd policy_cost(const TabularPolicy& policy, const Eigen::MatrixXd& h) {
  require_same_size(h.rows(), policy.probs.rows(), "cost rows");
  require_same_size(h.cols(), policy.probs.cols(), "cost cols");
  return policy.probs.cwiseProduct(h).rowwise().sum();
}

namespace {

Eigen::RowVectorXd dirichlet_row(int n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::RowVectorXd row(n);
  for (int i = 0; i < n; ++i) row(i) = expo(rng);
  row /= row.sum();
  return row;
}

// Exact on-simplex normalization: push the residual onto the largest entry.
void renormalize(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  row /= row.sum();
  Eigen::Index k;
  row.maxCoeff(&k);
  row(k) += 1.0 - row.sum();
}

}  // namespace

TabularCmdp random_cmdp(int n_states, int n_actions, double gamma, Rng& rng) {
  TabularCmdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.transition.resize(static_cast<Eigen::Index>(n_states) * n_actions, n_states);
  for (Eigen::Index r = 0; r < m.transition.rows(); ++r) {
    m.transition.row(r) = dirichlet_row(n_states, rng);
    renormalize(m.transition.row(r));
  }
  m.cost.resize(n_states, n_actions);
  for (Eigen::Index i = 0; i < m.cost.size(); ++i) m.cost(i) = uniform(rng);
  m.constraint_cost.resize(n_states);
  for (int x = 0; x < n_states; ++x) m.constraint_cost(x) = uniform(rng);
  return m;
}

TabularPolicy random_policy(int n_states, int n_actions, Rng& rng) {
  TabularPolicy p{Eigen::MatrixXd(n_states, n_actions)};
  for (int x = 0; x < n_states; ++x) {
    p.probs.row(x) = dirichlet_row(n_actions, rng);
    renormalize(p.probs.row(x));
  }
  return p;
}

FeasibleInstance random_feasible_instance(int n_states, int n_actions, double gamma, Rng& rng) {
  FeasibleInstance inst{random_cmdp(n_states, n_actions, gamma, rng),
                        random_policy(n_states, n_actions, rng)};
  // D_pi(x0) from (I - gamma P_pi) D = d, solved directly to keep this file standalone.
  const Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(n_states, n_states) - gamma * policy_transition(inst.cmdp, inst.initial);
  const Eigen::VectorXd d = a.partialPivLu().solve(inst.cmdp.constraint_cost);
  inst.cmdp.d0 = d(inst.cmdp.x0) * (1.0 + 0.1 * uniform(rng));
  return inst;
}

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd rows_matrix(const json& j, const std::string& field) {
  require(j.is_array() && !j.empty(), ErrorCode::kInvalidArgument, field + " must be a 2-d array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    require_same_size(static_cast<long>(j.at(i).size()), cols, field + " row length");
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = j.at(i).at(j2).get<double>();
  }
  return m;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_json(const TabularCmdp& cmdp, int indent) {
  json j;
  j["n_states"] = cmdp.n_states;
  j["n_actions"] = cmdp.n_actions;
  json p = json::array();
  for (int x = 0; x < cmdp.n_states; ++x) {
    json per_action = json::array();
    for (int a = 0; a < cmdp.n_actions; ++a) {
      json next = json::array();
      for (int y = 0; y < cmdp.n_states; ++y) next.push_back(cmdp.transition(cmdp.row(x, a), y));
      per_action.push_back(std::move(next));
    }
    p.push_back(std::move(per_action));
  }
  j["transition"] = std::move(p);
  j["cost"] = matrix_rows(cmdp.cost);
  j["constraint_cost"] = std::vector<double>(cmdp.constraint_cost.data(),
                                             cmdp.constraint_cost.data() + cmdp.constraint_cost.size());
  j["gamma"] = cmdp.gamma;
  j["x0"] = cmdp.x0;
  j["d0"] = cmdp.constrained() ? json(cmdp.d0) : json(nullptr);
  return j.dump(indent);
}

TabularCmdp cmdp_from_json(const std::string& text) {
  const json j = parse(text);
  TabularCmdp m;
  try {
    m.n_states = j.at("n_states").get<int>();
    m.n_actions = j.at("n_actions").get<int>();
    const json& p = j.at("transition");
    require_same_size(static_cast<long>(p.size()), m.n_states, "transition first axis");
    m.transition.resize(static_cast<Eigen::Index>(m.n_states) * m.n_actions, m.n_states);
    for (int x = 0; x < m.n_states; ++x) {
      require_same_size(static_cast<long>(p.at(x).size()), m.n_actions, "transition second axis");
      for (int a = 0; a < m.n_actions; ++a) {
        require_same_size(static_cast<long>(p.at(x).at(a).size()), m.n_states,
                          "transition third axis");
        for (int y = 0; y < m.n_states; ++y) {
          m.transition(m.row(x, a), y) = p.at(x).at(a).at(y).get<double>();
        }
      }
    }
    m.cost = rows_matrix(j.at("cost"), "cost");
    const auto d = j.at("constraint_cost").get<std::vector<double>>();
    m.constraint_cost = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    m.gamma = j.at("gamma").get<double>();
    m.x0 = j.value("x0", 0);
    const json& d0 = j.at("d0");
    m.d0 = d0.is_null() ? std::numeric_limits<double>::infinity() : d0.get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad CMDP document: ") + e.what());
  }
  m.validate();
  return m;
}

TabularCmdp load_cmdp(const std::string& path) { return cmdp_from_json(read_file(path)); }

void save_cmdp(const TabularCmdp& cmdp, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path);
  out << to_json(cmdp) << '\n';
}

std::string to_json(const TabularPolicy& policy, int indent) {
  json j;
  j["probs"] = matrix_rows(policy.probs);
  return j.dump(indent);
}

TabularPolicy policy_from_json(const std::string& text) {
  const json j = parse(text);
  TabularPolicy p{rows_matrix(j.at("probs"), "probs")};
  p.validate();
  return p;
}

}  // namespace safe_rl::cmdp
