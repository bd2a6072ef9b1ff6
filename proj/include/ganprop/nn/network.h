// Copyright 2026 The ganprop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GANPROP_NN_NETWORK_H_
#define GANPROP_NN_NETWORK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/nn/tape.h"

namespace ganprop::nn {

enum class ActivationKind { kRelu, kLeakyRelu, kTanh, kSigmoid, kIdentity, kSoftmax };

struct Activation {
  ActivationKind kind = ActivationKind::kIdentity;
  // Only meaningful for kLeakyRelu.
  double slope = 0.2;

  static Activation Relu() { return {ActivationKind::kRelu, 0.0}; }
  static Activation LeakyRelu(double slope = 0.2) {
    return {ActivationKind::kLeakyRelu, slope};
  }
  static Activation Tanh() { return {ActivationKind::kTanh, 0.0}; }
  static Activation Sigmoid() { return {ActivationKind::kSigmoid, 0.0}; }
  static Activation Identity() { return {ActivationKind::kIdentity, 0.0}; }
  static Activation Softmax() { return {ActivationKind::kSoftmax, 0.0}; }

  friend bool operator==(const Activation&, const Activation&) = default;
};

std::string ActivationName(ActivationKind kind);
absl::StatusOr<ActivationKind> ParseActivationKind(std::string_view name);

// Shape of a fully connected network. layer_widths[0] is the input width and
// each subsequent entry is a layer output width, so there are
// layer_widths.size() - 1 layers and as many activations.
struct DenseNetworkSpec {
  std::vector<int> layer_widths;
  std::vector<Activation> activations;
  uint64_t seed = 0;

  int input_width() const { return layer_widths.front(); }
  int output_width() const { return layer_widths.back(); }
  size_t num_layers() const { return activations.size(); }

  absl::Status Validate() const;

  // Hidden layers share `hidden`; the last layer uses `output`.
  static DenseNetworkSpec Mlp(int input, std::span<const int> hidden_widths,
                              int output, Activation hidden,
                              Activation output_activation, uint64_t seed);

  friend bool operator==(const DenseNetworkSpec&,
                         const DenseNetworkSpec&) = default;
};

// y = x * weight + bias; weight is fan_in x fan_out.
struct DenseLayer {
  Matrix weight;
  Eigen::RowVectorXd bias;
};

// Parameters of a DenseNetwork placed on a tape.
struct BoundParameters {
  std::vector<Var> weights;
  std::vector<Var> biases;

  std::vector<Var> All() const;
};

class DenseNetwork {
 public:
  // Glorot-uniform weights from spec.seed, zero biases.
  static absl::StatusOr<DenseNetwork> Create(const DenseNetworkSpec& spec);
  // Adopts explicit layers; shapes must agree with `spec`.
  static absl::StatusOr<DenseNetwork> FromLayers(const DenseNetworkSpec& spec,
                                                 std::vector<DenseLayer> layers);

  const DenseNetworkSpec& spec() const { return spec_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  int input_width() const { return spec_.input_width(); }
  int output_width() const { return spec_.output_width(); }

  absl::StatusOr<Eigen::VectorXd> Forward(std::span<const double> input) const;
  // Row-by-row application of Forward; row i of the result is bit-identical to
  // Forward(row i of input).
  absl::StatusOr<Matrix> ForwardBatch(const Matrix& input) const;

  BoundParameters Bind(Tape& tape, bool trainable) const;
  // Differentiable forward over a batch. With apply_final_activation=false the
  // last layer's pre-activation (logits) is returned.
  Var Apply(const BoundParameters& params, Var input,
            bool apply_final_activation = true) const;

  // Parameter tensors in Bind().All() order: w0, b0, w1, b1, ...
  std::vector<Matrix> ParameterValues() const;
  absl::Status SetParameterValues(std::span<const Matrix> values);
  size_t ParameterCount() const;

 private:
  DenseNetwork(DenseNetworkSpec spec, std::vector<DenseLayer> layers)
      : spec_(std::move(spec)), layers_(std::move(layers)) {}

  DenseNetworkSpec spec_;
  std::vector<DenseLayer> layers_;
};

Var ApplyActivation(Var x, const Activation& activation);
void ApplyActivationInPlace(Eigen::Ref<Eigen::RowVectorXd> x,
                            const Activation& activation);

}  // namespace ganprop::nn

#endif  // GANPROP_NN_NETWORK_H_
