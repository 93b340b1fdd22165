#include "safe_rl/harness/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "safe_rl/cmdp/evaluation.hpp"
#include "safe_rl/cmdp/exact_gradient.hpp"
#include "safe_rl/cmdp/lp_oracle.hpp"
#include "safe_rl/cmdp/lyapunov.hpp"
#include "safe_rl/cmdp/spi.hpp"
#include "safe_rl/common/error.hpp"
#include "safe_rl/common/io.hpp"
#include "safe_rl/envs/gridworld.hpp"
#include "safe_rl/envs/masked_env.hpp"
#include "safe_rl/harness/experiment.hpp"
#include "safe_rl/nn/mlp.hpp"
#include "safe_rl/nn/policy.hpp"
#include "safe_rl/pg/ddpg.hpp"
#include "safe_rl/pg/lagrangian.hpp"
#include "safe_rl/pg/ppo.hpp"
#include "safe_rl/pg/projection.hpp"
#include "safe_rl/pg/tabular.hpp"

namespace safe_rl::harness {

using nlohmann::json;

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double directional_fd(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& v, double h) {
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b) / (a.norm() * b.norm()); }

// 1. SPI iterates stay feasible and improve; final cost bounded by the LP optimum.
CriterionResult spi_safety(const AcceptanceOptions&) {
  CriterionResult r{1, "spi_safety_monotonicity", false, "", "", 0.0, {}};
  Rng rng(SeedTree(2024).seed("spi"));
  double worst_violation = -1e300, worst_increase = -1e300, worst_gap = 0.0, min_gap = 1e300;
  int lp_below = 0;
  for (int i = 0; i < 100; ++i) {
    const cmdp::FeasibleInstance inst = cmdp::random_feasible_instance(5, 3, 0.9, rng);
    const cmdp::SpiResult res = cmdp::spi_run(inst.cmdp, inst.initial, 200, 1e-12);
    for (std::size_t k = 0; k < res.log.size(); ++k) {
      worst_violation = std::max(worst_violation, res.log[k].constraint - inst.cmdp.d0);
      if (k > 0) worst_increase = std::max(worst_increase, res.log[k].cost - res.log[k - 1].cost);
    }
    const double lp = cmdp::lp_optimal_cmdp(inst.cmdp).value;
    const double gap = res.log.back().cost - lp;
    lp_below += gap < -1e-8;
    worst_gap = std::max(worst_gap, gap);
    min_gap = std::min(min_gap, gap);
  }
  r.passed = worst_violation <= 1e-8 && worst_increase <= 1e-8 && lp_below == 0;
  r.observed = "max D - d0 = " + num(worst_violation) + ", max cost increase = " + num(worst_increase) +
               ", instances below LP optimum = " + std::to_string(lp_below);
  r.expected = "D - d0 <= 1e-8, cost increase <= 1e-8, final cost >= LP - 1e-8, runtime < 60 s";
  r.notes.push_back("optimality gap over LP optimum: min " + num(min_gap) + ", max " + num(worst_gap));
  return r;
}

// 2. Both auxiliary-cost forms fit the budget; the state-dependent one is at least as large.
CriterionResult epsilon_budget(const AcceptanceOptions&) {
  CriterionResult r{2, "epsilon_constructions", false, "", "", 0.0, {}};
  Rng rng(SeedTree(2024).seed("spi"));
  double worst_residual = 1e300, worst_order = 1e300;
  for (int i = 0; i < 100; ++i) {
    const cmdp::FeasibleInstance inst = cmdp::random_feasible_instance(5, 3, 0.9, rng);
    const double eps_c = cmdp::epsilon_constant(inst.cmdp, inst.initial);
    const Eigen::VectorXd const_vec = Eigen::VectorXd::Constant(5, eps_c);
    const Eigen::VectorXd sd = cmdp::epsilon_state_dependent(inst.cmdp, inst.initial);
    worst_residual = std::min({worst_residual, cmdp::epsilon_budget_residual(inst.cmdp, inst.initial, const_vec),
                               cmdp::epsilon_budget_residual(inst.cmdp, inst.initial, sd)});
    worst_order = std::min(worst_order, sd.sum() - const_vec.sum());
  }
  r.passed = worst_residual >= -1e-9 && worst_order >= -1e-9;
  r.observed = "min budget residual = " + num(worst_residual) +
               ", min (sum eps_state - sum eps_const) = " + num(worst_order);
  r.expected = "budget residual >= -1e-9 and state-dependent objective >= constant objective";
  return r;
}

// 3. Finite-difference checks of the differentiable operations.
CriterionResult gradient_integrity(const AcceptanceOptions&) {
  CriterionResult r{3, "gradient_integrity", false, "", "", 0.0, {}};
  Rng rng(SeedTree(2024).seed("grad"));
  double worst_mlp = 0.0, worst_logp = 0.0, worst_proj = 0.0;
  const int trials = 120;

  const nn::MlpSpec mlp = nn::MlpSpec::make(4, {8, 6}, 3, nn::Activation::kTanh, nn::OutputHead::kMean);
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd theta = nn::init_mlp(mlp, rng).values;
    const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(4, 3, [&] { return gaussian(rng); });
    const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return gaussian(rng); });
    nn::MlpTape tape;
    nn::mlp_forward(mlp, theta, x, &tape);
    const Eigen::VectorXd grad = nn::mlp_backward(mlp, theta, tape, w).params;
    const Eigen::VectorXd dir = gaussian_vector(rng, theta.size());
    const double fd = directional_fd(
        [&](const Eigen::VectorXd& p) { return (nn::mlp_forward(mlp, p, x).array() * w.array()).sum(); }, theta,
        dir, 1e-5);
    worst_mlp = std::max(worst_mlp, relative_error(grad.dot(dir), fd));
  }

  const nn::GaussianPolicy policy(
      nn::MlpSpec::make(4, {8}, 4, nn::Activation::kTanh, nn::OutputHead::kMeanLogVariance), 2);
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd theta = policy.init(rng, -1.0).values;
    const Eigen::MatrixXd s = Eigen::MatrixXd::NullaryExpr(4, 3, [&] { return gaussian(rng); });
    const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(2, 3, [&] { return gaussian(rng); });
    const Eigen::VectorXd wts = gaussian_vector(rng, 3);
    const Eigen::VectorXd grad = policy.log_prob_grad(theta, s, a, wts);
    const Eigen::VectorXd dir = gaussian_vector(rng, theta.size());
    const double fd = directional_fd(
        [&](const Eigen::VectorXd& p) { return policy.log_prob(p, s, a).dot(wts); }, theta, dir, 1e-5);
    worst_logp = std::max(worst_logp, relative_error(grad.dot(dir), fd));
  }

  const nn::MlpSpec actor = nn::MlpSpec::make(3, {6, 5}, 2, nn::Activation::kTanh, nn::OutputHead::kMean);
  const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(2, 3, [&] { return gaussian(rng); });
  const pg::ActionGradFn dq = [&](const Eigen::MatrixXd& o, const Eigen::MatrixXd& act) -> Eigen::MatrixXd {
    return act - m * o;
  };
  int active = 0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd theta = nn::init_mlp(actor, rng).values;
    const Eigen::MatrixXd obs = Eigen::MatrixXd::NullaryExpr(3, 4, [&] { return gaussian(rng); });
    const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(2, 4, [&] { return gaussian(rng); });
    const Eigen::MatrixXd mu = nn::mlp_forward(actor, theta, obs);
    const Eigen::MatrixXd base = mu + Eigen::MatrixXd::NullaryExpr(2, 4, [&] { return gaussian(rng); });
    const double eps = uniform(rng, -0.5, 0.5);
    for (Eigen::Index i = 0; i < 4; ++i) active += pg::safety_layer_project(mu.col(i), base.col(i), g.col(i), eps).active;
    const Eigen::VectorXd grad = pg::a_projection_actor_grad(actor, theta, obs, dq, g, base, eps);
    const Eigen::VectorXd dir = gaussian_vector(rng, theta.size());
    const double fd = directional_fd(
        [&](const Eigen::VectorXd& p) {
          const Eigen::MatrixXd a = pg::project_actions(nn::mlp_forward(actor, p, obs), base, g, eps);
          return 0.5 * (a - m * obs).colwise().squaredNorm().mean();
        },
        theta, dir, 1e-6);
    worst_proj = std::max(worst_proj, relative_error(grad.dot(dir), fd));
  }

  r.passed = worst_mlp <= 1e-5 && worst_logp <= 1e-5 && worst_proj <= 1e-4;
  r.observed = std::to_string(trials) + " checks each; max rel err mlp_backward = " + num(worst_mlp) +
               ", gaussian_logprob = " + num(worst_logp) + ", a_projection_actor_grad = " + num(worst_proj) +
               " (" + std::to_string(active) + " active projections)";
  r.expected = ">= 100 checks each, rel err <= 1e-5 (<= 1e-4 for the projection), runtime < 30 s";
  return r;
}

Eigen::VectorXd halfspace_oracle(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& g,
                                 double eps) {
  auto viol = [&](double t) { return g.dot(a - t * g - b) - eps; };
  if (viol(0.0) <= 0.0) return a;
  double lo = 0.0, hi = 1.0;
  while (viol(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (viol(mid) > 0.0 ? lo : hi) = mid;
  }
  return a - hi * g;
}

double kkt_oracle(const Eigen::LDLT<Eigen::MatrixXd>& ldlt, const Eigen::VectorXd& gc, const Eigen::VectorXd& gd,
                  double eps, double beta) {
  auto slack = [&](double lam) { return gd.dot(-ldlt.solve(gc + lam * gd) / beta) - eps; };
  if (slack(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (slack(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slack(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// 4. Safety layer feasibility, idempotence and optimality; theta multiplier vs a KKT search.
CriterionResult projection_correctness(const AcceptanceOptions&) {
  CriterionResult r{4, "projection_correctness", false, "", "", 0.0, {}};
  Rng rng(SeedTree(2024).seed("projection"));
  double worst_feas = -1e300, worst_oracle = 0.0, worst_kkt = 0.0;
  int not_idempotent = 0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const Eigen::VectorXd a = gaussian_vector(rng, n, 2.0);
    const Eigen::VectorXd b = gaussian_vector(rng, n);
    const Eigen::VectorXd g = gaussian_vector(rng, n, uniform(rng, 0.01, 3.0));
    const double eps = uniform(rng, -1.0, 1.0);
    const pg::ProjectionResult p = pg::safety_layer_project(a, b, g, eps);
    worst_feas = std::max(worst_feas, g.dot(p.action - b) - eps);
    const pg::ProjectionResult again = pg::safety_layer_project(p.action, b, g, eps);
    not_idempotent += again.active || again.action != p.action;
    worst_oracle = std::max(worst_oracle, (p.action - halfspace_oracle(a, b, g, eps)).norm());
  }
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return gaussian(rng); });
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd gc = gaussian_vector(rng, n), gd = gaussian_vector(rng, n);
    const double eps = uniform(rng, -0.5, 0.5), beta = uniform(rng, 0.2, 5.0);
    const pg::ThetaProjection tp = pg::theta_projection_multiplier(
        gc, gd, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(ldlt.solve(v)); }, eps, beta);
    const double oracle = kkt_oracle(ldlt, gc, gd, eps, beta);
    worst_kkt = std::max(worst_kkt, std::abs(tp.multiplier - oracle) / std::max(1.0, oracle));
  }
  r.passed = worst_feas <= 1e-9 && not_idempotent == 0 && worst_oracle <= 1e-6 && worst_kkt <= 1e-6;
  r.observed = "max violation = " + num(worst_feas) + ", non-idempotent = " + std::to_string(not_idempotent) +
               ", max oracle distance = " + num(worst_oracle) + ", max multiplier error = " + num(worst_kkt);
  r.expected = "10^4 tuples: violation <= 1e-9, idempotent, oracle distance <= 1e-6; "
               "10^3 QPs: multiplier error <= 1e-6";
  return r;
}

// 5. Sampled gradients and Monte Carlo estimates against exact tabular values.
CriterionResult estimator_consistency(const AcceptanceOptions&) {
  CriterionResult r{5, "estimator_consistency", false, "", "", 0.0, {}};
  const cmdp::TabularCmdp m = envs::six_state_gridworld(0.9, 1.0);
  envs::GridworldEnv env(m, 200);
  const nn::TabularSoftmaxPolicy policy(6, 2);
  Rng rng(SeedTree(2024).seed("estimators"));
  const Eigen::VectorXd params = gaussian_vector(rng, 12, 0.5);
  const cmdp::TabularPolicy pi = cmdp::softmax_policy(pg::logits_from_params(params, 6, 2));
  const Eigen::VectorXd g_c = pg::exact_tabular_gradient(m, params, cmdp::CostKind::kCost);
  const Eigen::VectorXd g_d = pg::exact_tabular_gradient(m, params, cmdp::CostKind::kConstraint);
  const int n = 10000;
  const double lambda = 0.5;

  const double cos_lag =
      cosine(pg::lagrangian_trajectory_gradient(env, policy, params, lambda, n, rng).grad, g_c + lambda * g_d);
  const double cos_ppo_c = cosine(pg::tabular_ppo_gradient(env, policy, params, cmdp::policy_evaluate(m, pi, cmdp::CostKind::kCost),
                                                           nn::Signal::kCost, 0.95, n, rng),
                                  g_c);
  const double cos_ppo_d = cosine(pg::tabular_ppo_gradient(env, policy, params,
                                                           cmdp::policy_evaluate(m, pi, cmdp::CostKind::kConstraint),
                                                           nn::Signal::kConstraint, 0.95, n, rng),
                                  g_d);

  // Monte Carlo D(x0) and discounted state visitation; the absorbing goal keeps the geometric tail.
  Eigen::VectorXd d_samples(n);
  Eigen::MatrixXd visits = Eigen::MatrixXd::Zero(6, n);
  for (int j = 0; j < n; ++j) {
    int x = env.reset(rng());
    double disc = 1.0, d = 0.0;
    while (!env.done()) {
      visits(x, j) += disc;
      const envs::GridStep s = env.step(policy.sample(params, x, rng));
      d += disc * s.constraint_cost;
      disc *= m.gamma;
      x = s.next_state;
    }
    if (env.absorbing(x)) visits(x, j) += disc / (1.0 - m.gamma);
    d_samples[j] = d;
  }
  auto z_score = [&](const Eigen::VectorXd& samples, double exact) {
    const double mean = samples.mean();
    const double se = std::sqrt((samples.array() - mean).square().sum() / (n - 1) / n);
    return std::abs(mean - exact) / std::max(se, 1e-12);
  };
  const double z_d = z_score(d_samples, cmdp::policy_evaluate(m, pi, cmdp::CostKind::kConstraint)[m.x0]);
  const Eigen::VectorXd occ = cmdp::state_occupancy(m, pi);
  double z_visit = 0.0;
  for (int x = 0; x < 6; ++x) {
    const Eigen::VectorXd row = visits.row(x).transpose();
    if ((row.array() == row[0]).all() && std::abs(row[0] - occ[x]) < 1e-9) continue;  // deterministic visit
    z_visit = std::max(z_visit, z_score(row, occ[x]));
  }
  r.passed = cos_lag >= 0.99 && cos_ppo_c >= 0.99 && cos_ppo_d >= 0.99 && z_d <= 3.0 && z_visit <= 3.0;
  r.observed = "cosine Lagrangian = " + num(cos_lag) + ", PPO cost = " + num(cos_ppo_c) +
               ", PPO constraint = " + num(cos_ppo_d) + "; |z| D = " + num(z_d) + ", max |z| visitation = " +
               num(z_visit);
  r.expected = "cosine >= 0.99 at 10^4 episodes; estimates within 3 standard errors";
  return r;
}

// 6. With d = 0 the safe variants follow their baselines exactly.
CriterionResult reduction_identity(const AcceptanceOptions&) {
  CriterionResult r{6, "reduction_identity", false, "", "", 0.0, {}};
  envs::EnvConfig cfg = envs::default_env_config("point_gather");
  envs::MaskedEnv env(envs::make_env("point_gather", cfg), false, true);
  pg::SafePgConfig agent_cfg;
  agent_cfg.actor_hidden = {32, 16};
  agent_cfg.critic_hidden = {32, 16};
  agent_cfg.updates_per_iteration = 10;
  agent_cfg.critic_epochs = 3;
  double worst = 0.0;
  std::string detail;
  for (auto [base, safe] : {std::pair{"ddpg", "sddpg"}, std::pair{"ddpg", "sddpg_aproj"}, std::pair{"ppo", "sppo"},
                            std::pair{"ppo", "sppo_aproj"}}) {
    auto a = pg::make_agent(pg::parse_algorithm(base), agent_cfg, env.obs_dim(), env.action_dim(), cfg.d0, 5);
    auto b = pg::make_agent(pg::parse_algorithm(safe), agent_cfg, env.obs_dim(), env.action_dim(), cfg.d0, 5);
    double gap = 0.0;
    for (int it = 0; it < 10; ++it) {
      a->iterate(env, it, 5);
      b->iterate(env, it, 5);
      gap = std::max(gap, (a->actor_params() - b->actor_params()).cwiseAbs().maxCoeff());
    }
    worst = std::max(worst, gap);
    detail += std::string(detail.empty() ? "" : ", ") + safe + " vs " + base + " = " + num(gap);
  }
  r.passed = worst <= 1e-12;
  r.observed = "max parameter gap over 10 iterations: " + detail;
  r.expected = "<= 1e-12";
  return r;
}

// Fraction of entries in the last half of a trace satisfying pred.
double tail_fraction(const std::vector<MetricsRow>& rows, const std::function<bool(const MetricsRow&)>& pred) {
  const std::size_t begin = rows.size() / 2;
  if (begin >= rows.size()) return 0.0;
  int hits = 0;
  for (std::size_t i = begin; i < rows.size(); ++i) hits += pred(rows[i]);
  return static_cast<double>(hits) / static_cast<double>(rows.size() - begin);
}

// Sign changes of (D - d0) after the first 10% of iterations.
int crossings(const std::vector<MetricsRow>& rows, double d0, int* up, int* down) {
  *up = *down = 0;
  int prev = 0;
  for (std::size_t i = rows.size() / 10; i < rows.size(); ++i) {
    const int s = rows[i].mean_constraint_return > d0 ? 1 : -1;
    if (prev != 0 && s != prev) (s > 0 ? *up : *down) += 1;
    prev = s;
  }
  return *up + *down;
}

// 7. Desk-scale Point-Gather comparison. Only the safe-variant bound gates the result.
CriterionResult gather_comparison(const AcceptanceOptions& opt) {
  CriterionResult r{7, "gather_safety_comparison", false, "", "", 0.0, {}};
  const double d0 = 2.0;
  bool safe_ok = true;
  double worst_safe = 1.0, max_run_seconds = 0.0;
  std::ostringstream unconstrained, lagrangian;
  for (const std::string alg : {"sddpg", "sddpg_aproj", "ddpg", "ddpg_lagrangian"}) {
    for (int seed = 0; seed < opt.gather_seeds; ++seed) {
      ExperimentConfig c = default_experiment_config("point_gather", alg);
      c.env.d0 = d0;
      c.iterations = opt.gather_iterations;
      c.seed = static_cast<std::uint64_t>(seed);
      c.output_dir = (std::filesystem::path(opt.output_dir) / "gather" / (alg + "_seed" + std::to_string(seed))).string();
      const auto start = std::chrono::steady_clock::now();
      const RunResult run = run_experiment(c);
      max_run_seconds = std::max(max_run_seconds, elapsed(start));
      if (alg == "sddpg" || alg == "sddpg_aproj") {
        const double frac = tail_fraction(run.rows, [&](const MetricsRow& m) { return m.mean_constraint_return <= 1.1 * d0; });
        worst_safe = std::min(worst_safe, frac);
        safe_ok = safe_ok && frac >= 0.9;
      } else if (alg == "ddpg") {
        unconstrained << (seed ? ", " : "")
                      << num(tail_fraction(run.rows, [&](const MetricsRow& m) { return m.mean_constraint_return > d0; }));
      } else {
        int up = 0, down = 0;
        crossings(run.rows, d0, &up, &down);
        lagrangian << (seed ? ", " : "") << up << " up/" << down << " down";
      }
    }
  }
  const bool runtime_ok = max_run_seconds < 600.0;
  r.passed = safe_ok && runtime_ok;
  r.observed = "safe variants: min fraction of final-half checkpoints with D <= 1.1 d0 = " + num(worst_safe) +
               "; slowest run " + num(max_run_seconds) + " s";
  r.expected = ">= 0.9 for every safe run (sddpg, sddpg_aproj; " + std::to_string(opt.gather_seeds) +
               " seeds, " + std::to_string(opt.gather_iterations) + " iterations), each run < 600 s";
  r.notes.push_back("ddpg fraction of final-half checkpoints with D > d0 per seed: " + unconstrained.str() +
                    " (reference: >= 0.5; report only)");
  r.notes.push_back("ddpg_lagrangian crossings of d0 after warmup per seed: " + lagrangian.str() +
                    " (reference: both directions; report only)");
  r.notes.push_back("traces under " + (std::filesystem::path(opt.output_dir) / "gather").string());
  return r;
}

// 8. Identical config and seed give byte-identical CSVs.
CriterionResult reproducibility(const AcceptanceOptions& opt) {
  CriterionResult r{8, "reproducibility", false, "", "", 0.0, {}};
  bool same = true;
  std::string detail;
  for (const std::string alg : {"sddpg_aproj", "sppo"}) {
    ExperimentConfig c = default_experiment_config("point_gather", alg);
    c.iterations = 5;
    c.seed = 11;
    std::string texts[2];
    for (int k = 0; k < 2; ++k) {
      c.output_dir = (std::filesystem::path(opt.output_dir) / "repro" / (alg + "_" + std::to_string(k))).string();
      texts[k] = read_text_file(run_experiment(c).metrics_path);
    }
    const bool eq = texts[0] == texts[1];
    same = same && eq;
    detail += std::string(detail.empty() ? "" : ", ") + alg + (eq ? " identical" : " differ");
  }
  r.passed = same;
  r.observed = detail;
  r.expected = "byte-identical metrics CSVs";
  return r;
}

}  // namespace

bool AcceptanceReport::all_passed() const {
  for (const CriterionResult& c : criteria) {
    if (!c.passed) return false;
  }
  return !criteria.empty();
}

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  static constexpr Fn kChecks[kCriterionCount] = {spi_safety,         epsilon_budget,     gradient_integrity,
                                                  projection_correctness, estimator_consistency, reduction_identity,
                                                  gather_comparison,  reproducibility};
  require(id >= 1 && id <= kCriterionCount, ErrorCode::kInvalidArgument, "no criterion " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kChecks[id - 1](options);
  } catch (const std::exception& e) {
    r.id = id;
    r.passed = false;
    r.observed = std::string("exception: ") + e.what();
  }
  r.seconds = elapsed(start);
  static constexpr double kLimits[kCriterionCount] = {60.0, 0.0, 30.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  if (kLimits[id - 1] > 0.0 && r.seconds >= kLimits[id - 1]) {
    r.passed = false;
    r.observed += "; runtime " + num(r.seconds) + " s over limit";
  }
  return r;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
  AcceptanceReport report;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    report.criteria.push_back(run_criterion(id, options));
  }
  return report;
}

std::string format_line(const CriterionResult& r) {
  return std::string(r.passed ? "PASS " : "FAIL ") + std::to_string(r.id) + " " + r.name + ": observed " +
         r.observed + "; expected " + r.expected + " (" + num(r.seconds) + " s)";
}

std::string report_to_json(const AcceptanceReport& report, int indent) {
  json items = json::array();
  for (const CriterionResult& c : report.criteria) {
    items.push_back({{"id", c.id},
                     {"name", c.name},
                     {"passed", c.passed},
                     {"observed", c.observed},
                     {"expected", c.expected},
                     {"seconds", c.seconds},
                     {"notes", c.notes}});
  }
  return json{{"schema", "acceptance/1"}, {"all_passed", report.all_passed()}, {"criteria", items}}.dump(indent);
}

AcceptanceReport report_from_json(const std::string& text) {
  AcceptanceReport report;
  try {
    const json j = json::parse(text);
    for (const json& c : j.at("criteria")) {
      report.criteria.push_back({c.at("id").get<int>(), c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                                 c.at("observed").get<std::string>(), c.at("expected").get<std::string>(),
                                 c.at("seconds").get<double>(), c.value("notes", std::vector<std::string>{})});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad acceptance report: ") + e.what());
  }
  return report;
}

}  // namespace safe_rl::harness
