#include <doctest.h>

#include "grad_check.hpp"
#include "safe_rl/common/error.hpp"
#include "safe_rl/nn/mlp.hpp"

using namespace safe_rl;
using namespace safe_rl::nn;

namespace {

// Straightforward per-sample re-implementation, reading weights element by element.
Eigen::VectorXd naive_forward(const MlpSpec& spec, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
  std::vector<double> h(x.data(), x.data() + x.size());
  Eigen::Index off = 0;
  for (int l = 0; l < spec.n_layers(); ++l) {
    const int in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    std::vector<double> z(out, 0.0);
    for (int o = 0; o < out; ++o) {
      for (int i = 0; i < in; ++i) z[o] += p[off + static_cast<Eigen::Index>(i) * out + o] * h[i];
      z[o] += p[off + static_cast<Eigen::Index>(in) * out + o];
    }
    off += static_cast<Eigen::Index>(out) * (in + 1);
    if (l + 1 < spec.n_layers()) {
      for (double& v : z) v = spec.activation == Activation::kRelu ? std::max(v, 0.0) : std::tanh(v);
    }
    h = z;
  }
  return Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
}

MlpSpec random_spec(Rng& rng, Activation act) {
  std::uniform_int_distribution<int> size(1, 6), depth(1, 3);
  std::vector<int> hidden(depth(rng));
  for (int& h : hidden) h = size(rng);
  return MlpSpec::make(size(rng), hidden, size(rng), act, OutputHead::kMean);
}

bool near_kink(const MlpSpec& spec, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
  MlpTape tape;
  mlp_forward(spec, p, Eigen::MatrixXd(x), &tape);
  for (std::size_t l = 0; l + 1 < tape.pre_activations.size(); ++l) {
    if ((tape.pre_activations[l].array().abs() < 1e-3).any()) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("mlp spec validation") {
  CHECK_THROWS_AS(MlpSpec::make(2, {}, 1, Activation::kTanh, OutputHead::kScalar), Error);
  CHECK_THROWS_AS(MlpSpec::make(2, {0}, 1, Activation::kTanh, OutputHead::kScalar), Error);
  CHECK_THROWS_AS(MlpSpec::make(2, {3}, 2, Activation::kTanh, OutputHead::kScalar), Error);
  CHECK_THROWS_AS(MlpSpec::make(2, {3}, 3, Activation::kTanh, OutputHead::kMeanLogVariance), Error);
  const MlpSpec s = MlpSpec::make(3, {100, 50}, 4, Activation::kRelu, OutputHead::kMeanLogVariance);
  CHECK(s.param_count() == 100 * 4 + 50 * 101 + 4 * 51);
  ParamVector p{Eigen::VectorXd::Zero(s.param_count()), s.layout()};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("mlp forward: zero weights give zero output") {
  const MlpSpec s = MlpSpec::make(3, {4, 5}, 2, Activation::kTanh, OutputHead::kMean);
  const Eigen::VectorXd out = mlp_apply(s, Eigen::VectorXd::Zero(s.param_count()), Eigen::Vector3d(1, -2, 3));
  CHECK(out.isZero(0.0));
}

TEST_CASE("mlp forward: identity-like 1x1 net maps 3 to 3") {
  const MlpSpec s = MlpSpec::make(1, {1}, 1, Activation::kRelu, OutputHead::kScalar);
  const Eigen::VectorXd p = (Eigen::VectorXd(4) << 1, 0, 1, 0).finished();
  CHECK(mlp_apply(s, p, Eigen::VectorXd::Constant(1, 3.0))[0] == 3.0);
}

TEST_CASE("mlp forward: dimension mismatch") {
  const MlpSpec s = MlpSpec::make(3, {4}, 1, Activation::kTanh, OutputHead::kScalar);
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(s.param_count());
  CHECK_THROWS_AS(mlp_apply(s, p, Eigen::VectorXd::Zero(2)), Error);
  CHECK_THROWS_AS(mlp_apply(s, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), Error);
  MlpTape tape;
  mlp_forward(s, p, Eigen::MatrixXd::Zero(3, 2), &tape);
  CHECK_THROWS_AS(mlp_backward(s, p, tape, Eigen::MatrixXd::Zero(1, 3)), Error);
}

TEST_CASE("mlp forward matches a naive re-implementation") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const MlpSpec s = random_spec(rng, trial % 2 ? Activation::kRelu : Activation::kTanh);
    const ParamVector p = init_mlp(s, rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(s.input_dim(), 3) * 2.0;
    const Eigen::MatrixXd batched = mlp_forward(s, p.values, x);
    for (int c = 0; c < 3; ++c) {
      CHECK((batched.col(c) - naive_forward(s, p.values, x.col(c))).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("mlp backward: linear 1x1 net gives dy/dw = x") {
  // With a 1-unit hidden layer and identity-like output, y = w x + b on the positive side.
  const MlpSpec s = MlpSpec::make(1, {1}, 1, Activation::kRelu, OutputHead::kScalar);
  const Eigen::VectorXd p = (Eigen::VectorXd(4) << 2.0, 0.0, 1.0, 0.0).finished();
  const MlpGradients g = mlp_vjp(s, p, Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Ones(1));
  CHECK(g.params[0] == doctest::Approx(3.0));
  CHECK(g.params[2] == doctest::Approx(6.0));  // output weight sees hidden activation 2*3
  CHECK(g.input(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("mlp backward: dead relu unit passes no gradient") {
  const MlpSpec s = MlpSpec::make(1, {2}, 1, Activation::kRelu, OutputHead::kScalar);
  // hidden 0: w=1 (alive for x=1), hidden 1: w=-1 (dead)
  Eigen::VectorXd p(2 + 2 + 2 + 1);
  p << 1, -1, 0, 0, 1, 1, 0;
  const MlpGradients g = mlp_vjp(s, p, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
  CHECK(g.params[1] == 0.0);  // first-layer weight of dead unit
  CHECK(g.params[3] == 0.0);  // its bias
  CHECK(g.params[5] == 0.0);  // its output weight (activation 0)
  CHECK(g.params[0] == 1.0);
}

TEST_CASE("mlp backward matches central finite differences") {
  Rng rng(12);
  int checked = 0;
  while (checked < 200) {
    const Activation act = checked % 2 ? Activation::kRelu : Activation::kTanh;
    const MlpSpec s = random_spec(rng, act);
    const Eigen::VectorXd p = init_mlp(s, rng).values * 2.0;
    const Eigen::VectorXd x = Eigen::VectorXd::Random(s.input_dim());
    if (act == Activation::kRelu && near_kink(s, p, x)) continue;
    const Eigen::VectorXd w = Eigen::VectorXd::Random(s.output_dim());
    const MlpGradients g = mlp_vjp(s, p, x, w);

    const Eigen::VectorXd dp = Eigen::VectorXd::Random(p.size());
    const double fd_p = fixtures::directional_fd(
        [&](const Eigen::VectorXd& q) { return w.dot(mlp_apply(s, q, x)); }, p, dp);
    CHECK(fixtures::relative_error(fd_p, g.params.dot(dp)) <= 1e-5);

    const Eigen::VectorXd dx = Eigen::VectorXd::Random(x.size());
    const double fd_x = fixtures::directional_fd(
        [&](const Eigen::VectorXd& y) { return w.dot(mlp_apply(s, p, y)); }, x, dx);
    CHECK(fixtures::relative_error(fd_x, g.input.col(0).dot(dx)) <= 1e-5);
    ++checked;
  }
}

TEST_CASE("mlp init: zero output layer and fan-in bounds") {
  Rng rng(3);
  const MlpSpec s = MlpSpec::make(4, {200, 50}, 1, Activation::kTanh, OutputHead::kScalar);
  const ParamVector p = init_mlp(s, rng, true);
  CHECK(p.block(4).isZero(0.0));
  CHECK(p.block(5).isZero(0.0));
  CHECK(p.block(0).cwiseAbs().maxCoeff() <= 0.5);
  CHECK(p.block(2).cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(200.0));
  Rng rng2(3);
  CHECK(init_mlp(s, rng2, true).values == p.values);
}
