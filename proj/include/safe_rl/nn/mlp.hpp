#pragma once

#include <vector>

#include <Eigen/Core>

#include "safe_rl/common/rng.hpp"
#include "safe_rl/nn/param_vector.hpp"

namespace safe_rl::nn {

enum class Activation { kRelu, kTanh };

// How the final (linear) layer is read by callers.
enum class OutputHead { kScalar, kMean, kMeanLogVariance };

// Fully connected network: hidden layers use `activation`, the output layer
// is affine. layer_sizes = {input, hidden..., output}.
struct MlpSpec {
  std::vector<int> layer_sizes;
  Activation activation = Activation::kTanh;
  OutputHead head = OutputHead::kScalar;

  static MlpSpec make(int input, std::vector<int> hidden, int output, Activation activation,
                      OutputHead head);

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int n_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  Eigen::Index param_count() const;
  std::vector<ParamSlice> layout() const;

  // At least one hidden layer, positive sizes, output consistent with the head.
  void validate() const;
};

// Uniform fan-in initialization U(-1/sqrt(fan_in), 1/sqrt(fan_in)). With
// zero_output the final layer starts at exactly zero.
ParamVector init_mlp(const MlpSpec& spec, Rng& rng, bool zero_output = false);

// Activations recorded by a forward pass; inputs are stored column-wise.
struct MlpTape {
  std::vector<Eigen::MatrixXd> layer_inputs;  // layer_inputs[l] feeds layer l
  std::vector<Eigen::MatrixXd> pre_activations;
};

// Batched forward pass: input is input_dim x batch.
Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const Eigen::VectorXd& params,
                            const Eigen::MatrixXd& input, MlpTape* tape = nullptr);
// Single input vector.
Eigen::VectorXd mlp_apply(const MlpSpec& spec, const Eigen::VectorXd& params,
                          const Eigen::VectorXd& input);

struct MlpGradients {
  Eigen::VectorXd params;  // summed over the batch
  Eigen::MatrixXd input;   // per column
};

// Reverse-mode pass for the vector-Jacobian product output_grad^T J.
MlpGradients mlp_backward(const MlpSpec& spec, const Eigen::VectorXd& params,
                          const MlpTape& tape, const Eigen::MatrixXd& output_grad);

// Convenience: forward + backward on a single input.
MlpGradients mlp_vjp(const MlpSpec& spec, const Eigen::VectorXd& params,
                     const Eigen::VectorXd& input, const Eigen::VectorXd& output_grad);

}  // namespace safe_rl::nn
