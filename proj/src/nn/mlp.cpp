#include "safe_rl/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "safe_rl/common/error.hpp"

namespace safe_rl::nn {

MlpSpec MlpSpec::make(int input, std::vector<int> hidden, int output, Activation activation,
                      OutputHead head) {
  MlpSpec s;
  s.layer_sizes.push_back(input);
  s.layer_sizes.insert(s.layer_sizes.end(), hidden.begin(), hidden.end());
  s.layer_sizes.push_back(output);
  s.activation = activation;
  s.head = head;
  s.validate();
  return s;
}

Eigen::Index MlpSpec::param_count() const {
  Eigen::Index n = 0;
  for (int l = 0; l < n_layers(); ++l) n += static_cast<Eigen::Index>(layer_sizes[l + 1]) * (layer_sizes[l] + 1);
  return n;
}

std::vector<ParamSlice> MlpSpec::layout() const {
  std::vector<ParamSlice> out;
  Eigen::Index offset = 0;
  for (int l = 0; l < n_layers(); ++l) {
    const Eigen::Index in = layer_sizes[l], outd = layer_sizes[l + 1];
    out.push_back({"layer" + std::to_string(l) + ".weight", offset, outd, in});
    offset += outd * in;
    out.push_back({"layer" + std::to_string(l) + ".bias", offset, outd, 1});
    offset += outd;
  }
  return out;
}

void MlpSpec::validate() const {
  require(layer_sizes.size() >= 3, ErrorCode::kInvalidArgument,
          "an MLP needs at least one hidden layer");
  for (int s : layer_sizes) require(s > 0, ErrorCode::kInvalidArgument, "layer sizes must be positive");
  switch (head) {
    case OutputHead::kScalar:
      require(output_dim() == 1, ErrorCode::kInvalidArgument, "scalar head needs output size 1");
      break;
    case OutputHead::kMeanLogVariance:
      require(output_dim() % 2 == 0, ErrorCode::kInvalidArgument,
              "mean + log-variance head needs an even output size");
      break;
    case OutputHead::kMean:
      break;
  }
}

ParamVector init_mlp(const MlpSpec& spec, Rng& rng, bool zero_output) {
  spec.validate();
  ParamVector p{Eigen::VectorXd(spec.param_count()), spec.layout()};
  for (int l = 0; l < spec.n_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.layer_sizes[l]));
    const bool zero = zero_output && l == spec.n_layers() - 1;
    for (std::size_t k : {2 * static_cast<std::size_t>(l), 2 * static_cast<std::size_t>(l) + 1}) {
      auto blk = p.block(k);
      for (Eigen::Index i = 0; i < blk.size(); ++i) {
        blk.data()[i] = zero ? 0.0 : uniform(rng, -bound, bound);
      }
    }
  }
  return p;
}

namespace {

struct LayerView {
  Eigen::Map<const Eigen::MatrixXd> weight;
  Eigen::Map<const Eigen::VectorXd> bias;
};

LayerView layer(const MlpSpec& spec, const Eigen::VectorXd& params, int l, Eigen::Index offset) {
  const Eigen::Index in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
  return {Eigen::Map<const Eigen::MatrixXd>(params.data() + offset, out, in),
          Eigen::Map<const Eigen::VectorXd>(params.data() + offset + out * in, out)};
}

void check_params(const MlpSpec& spec, const Eigen::VectorXd& params) {
  require_same_size(params.size(), spec.param_count(), "MLP parameter count");
}

}  // namespace

Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const Eigen::VectorXd& params,
                            const Eigen::MatrixXd& input, MlpTape* tape) {
  check_params(spec, params);
  require_same_size(input.rows(), spec.input_dim(), "MLP input dimension");
  if (tape) {
    tape->layer_inputs.clear();
    tape->pre_activations.clear();
  }
  Eigen::MatrixXd h = input;
  Eigen::Index offset = 0;
  for (int l = 0; l < spec.n_layers(); ++l) {
    const LayerView lv = layer(spec, params, l, offset);
    offset += lv.weight.size() + lv.bias.size();
    Eigen::MatrixXd z = lv.weight * h;
    z.colwise() += lv.bias;
    if (tape) {
      tape->layer_inputs.push_back(std::move(h));
      tape->pre_activations.push_back(z);
    }
    if (l + 1 == spec.n_layers()) return z;
    h = spec.activation == Activation::kRelu ? Eigen::MatrixXd(z.cwiseMax(0.0))
                                             : Eigen::MatrixXd(z.array().tanh().matrix());
  }
  return h;  // unreachable: n_layers() >= 2
}

Eigen::VectorXd mlp_apply(const MlpSpec& spec, const Eigen::VectorXd& params,
                          const Eigen::VectorXd& input) {
  return mlp_forward(spec, params, Eigen::MatrixXd(input), nullptr).col(0);
}

MlpGradients mlp_backward(const MlpSpec& spec, const Eigen::VectorXd& params, const MlpTape& tape,
                          const Eigen::MatrixXd& output_grad) {
  check_params(spec, params);
  require_same_size(static_cast<long>(tape.layer_inputs.size()), spec.n_layers(), "tape depth");
  require_same_size(output_grad.rows(), spec.output_dim(), "output gradient rows");
  require_same_size(output_grad.cols(), tape.layer_inputs.front().cols(), "output gradient batch");

  MlpGradients g;
  g.params.resize(params.size());
  std::vector<Eigen::Index> offsets(spec.n_layers());
  Eigen::Index offset = 0;
  for (int l = 0; l < spec.n_layers(); ++l) {
    offsets[l] = offset;
    offset += static_cast<Eigen::Index>(spec.layer_sizes[l + 1]) * (spec.layer_sizes[l] + 1);
  }

  Eigen::MatrixXd delta = output_grad;  // dLoss / d pre-activation of layer l
  for (int l = spec.n_layers() - 1; l >= 0; --l) {
    const LayerView lv = layer(spec, params, l, offsets[l]);
    const Eigen::Index out = lv.weight.rows(), in = lv.weight.cols();
    Eigen::Map<Eigen::MatrixXd>(g.params.data() + offsets[l], out, in).noalias() =
        delta * tape.layer_inputs[l].transpose();
    Eigen::Map<Eigen::VectorXd>(g.params.data() + offsets[l] + out * in, out) = delta.rowwise().sum();
    Eigen::MatrixXd upstream = lv.weight.transpose() * delta;
    if (l == 0) {
      g.input = std::move(upstream);
      break;
    }
    const Eigen::MatrixXd& z = tape.pre_activations[l - 1];
    if (spec.activation == Activation::kRelu) {
      delta = upstream.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    } else {
      delta = upstream.cwiseProduct((1.0 - z.array().tanh().square()).matrix());
    }
  }
  return g;
}

MlpGradients mlp_vjp(const MlpSpec& spec, const Eigen::VectorXd& params,
                     const Eigen::VectorXd& input, const Eigen::VectorXd& output_grad) {
  MlpTape tape;
  mlp_forward(spec, params, Eigen::MatrixXd(input), &tape);
  return mlp_backward(spec, params, tape, Eigen::MatrixXd(output_grad));
}

}  // namespace safe_rl::nn
