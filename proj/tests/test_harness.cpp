#include <doctest.h>

#include <filesystem>

#include "safe_rl/common/error.hpp"
#include "safe_rl/common/io.hpp"
#include "safe_rl/harness/acceptance.hpp"
#include "safe_rl/harness/experiment.hpp"
#include "safe_rl/pg/projection.hpp"

using namespace safe_rl;
using namespace safe_rl::harness;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("safe_rl_test_" + name);
  fs::remove_all(p);
  return p.string();
}

ExperimentConfig tiny_config(const std::string& alg, const std::string& out) {
  ExperimentConfig c = default_experiment_config("point_gather", alg);
  c.agent.actor_hidden = {16, 8};
  c.agent.critic_hidden = {16, 8};
  c.agent.batch_size = 16;
  c.agent.updates_per_iteration = 3;
  c.agent.critic_epochs = 2;
  c.iterations = 2;
  c.episodes_per_iteration = 2;
  c.eval_episodes = 3;
  c.seed = 4;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("config JSON round-trips and rejects unknown keys") {
  ExperimentConfig c = default_experiment_config("point_circle", "sppo");
  c.seed = 17;
  c.agent.actor_hidden = {8, 4};
  c.env.d0 = 3.5;
  const ExperimentConfig back = experiment_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.seed == 17);
  CHECK(back.env.d0 == 3.5);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"iteratons": 3})"), Error);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"agent": {"gama": 0.9}})"), Error);
  const ExperimentConfig partial = experiment_config_from_json(R"({"iterations": 7})");
  CHECK(partial.iterations == 7);
  CHECK(partial.algorithm == ExperimentConfig{}.algorithm);
}

TEST_CASE("invalid config throws before touching disk") {
  const std::string out = temp_dir("invalid");
  ExperimentConfig c = tiny_config("ppo", out);
  c.agent.gamma = 1.5;
  CHECK_THROWS_AS(run_experiment(c), Error);
  CHECK_FALSE(fs::exists(out));
  c = tiny_config("ppo", out);
  c.algorithm = "nope";
  CHECK_THROWS_AS(run_experiment(c), Error);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("metrics CSV round-trips and tolerates unknown columns") {
  std::vector<MetricsRow> rows(2);
  rows[0] = {0, -1.25, 0.1, 0.0, 1e-3, std::nullopt, std::nullopt};
  rows[1] = {1, 0.1 + 0.2, 2.0 / 3.0, 0.5, 0.0, 0.25, 1.5};
  const auto back = parse_metrics_csv(metrics_csv(rows));
  REQUIRE(back.size() == 2);
  CHECK(back[1].mean_return == rows[1].mean_return);
  CHECK(back[1].mean_constraint_return == rows[1].mean_constraint_return);
  CHECK_FALSE(back[0].lambda.has_value());
  CHECK(back[1].lambda == 0.25);
  CHECK(back[1].wall_clock == 1.5);

  const std::string extra =
      "# schema=metrics/1\nextra,iteration,mean_return,mean_constraint_return,violation_fraction,policy_kl\n"
      "x,3,1,2,0,0\n";
  const auto e = parse_metrics_csv(extra);
  REQUIRE(e.size() == 1);
  CHECK(e[0].iteration == 3);
  CHECK(e[0].mean_constraint_return == 2.0);

  MetricsRow bad;
  bad.violation_fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("traces CSV round-trips") {
  const std::vector<TraceRow> rows{{0, "lambda", 0.5}, {1, "eval_return", -3.0 / 7.0}};
  const auto back = parse_traces_csv(traces_csv(rows));
  REQUIRE(back.size() == 2);
  CHECK(back[1].series == "eval_return");
  CHECK(back[1].value == rows[1].value);
}

TEST_CASE("zero iterations writes a header-only metrics file") {
  const std::string out = temp_dir("zero");
  ExperimentConfig c = tiny_config("ddpg", out);
  c.iterations = 0;
  const RunResult r = run_experiment(c);
  CHECK(r.rows.empty());
  const std::string text = read_text_file(r.metrics_path);
  CHECK(text == "# schema=metrics/1\n" + metrics_header() + "\n");
  fs::remove_all(out);
}

TEST_CASE("identical configs give byte-identical metrics") {
  for (const std::string alg : {"sddpg_aproj", "sppo", "ddpg_lagrangian"}) {
    CAPTURE(alg);
    const std::string a = temp_dir("repro_a"), b = temp_dir("repro_b");
    const RunResult ra = run_experiment(tiny_config(alg, a));
    const RunResult rb = run_experiment(tiny_config(alg, b));
    CHECK(read_text_file(ra.metrics_path) == read_text_file(rb.metrics_path));
    CHECK(read_text_file(ra.traces_path) == read_text_file(rb.traces_path));
    REQUIRE(ra.rows.size() == 2);
    CHECK(ra.rows[0].lambda.has_value() == (alg != "sddpg_aproj"));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("a checkpoint reloads into an agent that evaluates identically") {
  const std::string out = temp_dir("reload");
  const ExperimentConfig c = tiny_config("sppo", out);
  const RunResult r = run_experiment(c);
  LoadedRun loaded = load_run(r.checkpoint_path);
  CHECK(loaded.iterations_completed == 2);
  CHECK(to_json(loaded.config) == to_json(c));
  const pg::ReturnSummary s =
      evaluate_agent(*loaded.agent, *loaded.env, c.eval_episodes, evaluation_seed(c.seed), c.agent.gamma);
  CHECK(s.mean_return == r.rows.back().mean_return);
  CHECK(s.mean_constraint_return == r.rows.back().mean_constraint_return);
  fs::remove_all(out);
}

TEST_CASE("random-policy constraint return on Gather stays in the reachable range") {
  auto env = envs::make_env("point_gather", envs::default_env_config("point_gather"));
  const pg::ActionFn act = [&](const Eigen::VectorXd&) {
    return Eigen::VectorXd(Eigen::VectorXd::Random(env->action_dim()));
  };
  const pg::ReturnSummary s = pg::evaluate_policy(*env, act, 50, 9, 0.99);
  CHECK(s.mean_constraint_return >= 0.0);
  CHECK(s.mean_constraint_return <= 8.0);
  CHECK((s.constraint_returns.array() >= 0.0).all());
}

TEST_CASE("acceptance report JSON round-trips") {
  AcceptanceReport rep;
  rep.criteria.push_back({4, "projection", true, "obs", "exp", 0.5, {"a note"}});
  rep.criteria.push_back({2, "eps", false, "o", "e", 1.0, {}});
  const AcceptanceReport back = report_from_json(report_to_json(rep));
  REQUIRE(back.criteria.size() == 2);
  CHECK(back.criteria[0].notes == rep.criteria[0].notes);
  CHECK_FALSE(back.all_passed());
  CHECK(format_line(back.criteria[0]).rfind("PASS 4 projection", 0) == 0);
  CHECK(format_line(back.criteria[1]).rfind("FAIL 2 eps", 0) == 0);
}

TEST_CASE("the projection criterion detects a flipped correction sign") {
  AcceptanceOptions opts;
  CHECK(run_criterion(4, opts).passed);
  pg::testing::set_projection_sign_fault(true);
  const CriterionResult faulty = run_criterion(4, opts);
  pg::testing::set_projection_sign_fault(false);
  CHECK_FALSE(faulty.passed);
}

TEST_CASE("unknown criterion ids are rejected") {
  CHECK_THROWS_AS(run_criterion(42, AcceptanceOptions{}), Error);
  CHECK_THROWS_AS(run_criterion(0, AcceptanceOptions{}), Error);
}
