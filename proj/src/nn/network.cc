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

#include "ganprop/nn/network.h"

#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "ganprop/common/random.h"

namespace ganprop::nn {

std::string ActivationName(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRelu:
      return "relu";
    case ActivationKind::kLeakyRelu:
      return "leaky_relu";
    case ActivationKind::kTanh:
      return "tanh";
    case ActivationKind::kSigmoid:
      return "sigmoid";
    case ActivationKind::kIdentity:
      return "identity";
    case ActivationKind::kSoftmax:
      return "softmax";
  }
  return "unknown";
}

absl::StatusOr<ActivationKind> ParseActivationKind(std::string_view name) {
  for (ActivationKind k :
       {ActivationKind::kRelu, ActivationKind::kLeakyRelu,
        ActivationKind::kTanh, ActivationKind::kSigmoid,
        ActivationKind::kIdentity, ActivationKind::kSoftmax}) {
    if (ActivationName(k) == name) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown activation '", std::string(name), "'"));
}

absl::Status DenseNetworkSpec::Validate() const {
  if (layer_widths.size() < 2) {
    return absl::InvalidArgumentError(
        "network needs an input width and at least one layer");
  }
  if (activations.size() != layer_widths.size() - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", layer_widths.size() - 1, " activations, got ",
        activations.size()));
  }
  for (size_t i = 0; i < layer_widths.size(); ++i) {
    if (layer_widths[i] < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer width ", i, " must be >= 1"));
    }
  }
  for (size_t i = 0; i < activations.size(); ++i) {
    const Activation& a = activations[i];
    if (a.kind == ActivationKind::kLeakyRelu &&
        !(a.slope > 0.0 && a.slope < 1.0)) {
      return absl::InvalidArgumentError("leaky_relu slope must be in (0,1)");
    }
    if (a.kind == ActivationKind::kSoftmax && i + 1 != activations.size()) {
      return absl::InvalidArgumentError(
          "softmax is only allowed as the final activation");
    }
  }
  return absl::OkStatus();
}

DenseNetworkSpec DenseNetworkSpec::Mlp(int input,
                                       std::span<const int> hidden_widths,
                                       int output, Activation hidden,
                                       Activation output_activation,
                                       uint64_t seed) {
  DenseNetworkSpec spec;
  spec.layer_widths.push_back(input);
  for (int w : hidden_widths) {
    spec.layer_widths.push_back(w);
    spec.activations.push_back(hidden);
  }
  spec.layer_widths.push_back(output);
  spec.activations.push_back(output_activation);
  spec.seed = seed;
  return spec;
}

std::vector<Var> BoundParameters::All() const {
  std::vector<Var> out;
  for (size_t i = 0; i < weights.size(); ++i) {
    out.push_back(weights[i]);
    out.push_back(biases[i]);
  }
  return out;
}

absl::StatusOr<DenseNetwork> DenseNetwork::Create(const DenseNetworkSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  Rng rng(DeriveSeed(spec.seed, "dense_init"));
  std::vector<DenseLayer> layers;
  for (size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
    const int fan_in = spec.layer_widths[l];
    const int fan_out = spec.layer_widths[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weight.resize(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) layer.weight(i, j) = dist(rng);
    }
    layer.bias = Eigen::RowVectorXd::Zero(fan_out);
    layers.push_back(std::move(layer));
  }
  return DenseNetwork(spec, std::move(layers));
}

absl::StatusOr<DenseNetwork> DenseNetwork::FromLayers(
    const DenseNetworkSpec& spec, std::vector<DenseLayer> layers) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  if (layers.size() != spec.num_layers()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "spec has ", spec.num_layers(), " layers, got ", layers.size()));
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    const int fan_in = spec.layer_widths[l];
    const int fan_out = spec.layer_widths[l + 1];
    if (layers[l].weight.rows() != fan_in || layers[l].weight.cols() != fan_out ||
        layers[l].bias.size() != fan_out) {
      return absl::InvalidArgumentError(absl::StrCat(
          "layer ", l, " expects weight ", fan_in, "x", fan_out, " and bias ",
          fan_out, ", got ", layers[l].weight.rows(), "x",
          layers[l].weight.cols(), " and ", layers[l].bias.size()));
    }
  }
  return DenseNetwork(spec, std::move(layers));
}

void ApplyActivationInPlace(Eigen::Ref<Eigen::RowVectorXd> x,
                            const Activation& activation) {
  switch (activation.kind) {
    case ActivationKind::kRelu:
      x = x.cwiseMax(0.0);
      return;
    case ActivationKind::kLeakyRelu:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) x[i] *= activation.slope;
      }
      return;
    case ActivationKind::kTanh:
      x = x.array().tanh().matrix();
      return;
    case ActivationKind::kSigmoid:
      x = x.unaryExpr(&StableSigmoid);
      return;
    case ActivationKind::kIdentity:
      return;
    case ActivationKind::kSoftmax: {
      const double m = x.maxCoeff();
      x = (x.array() - m).exp().matrix();
      x /= x.sum();
      return;
    }
  }
}

Var ApplyActivation(Var x, const Activation& activation) {
  switch (activation.kind) {
    case ActivationKind::kRelu:
      return Relu(x);
    case ActivationKind::kLeakyRelu:
      return LeakyRelu(x, activation.slope);
    case ActivationKind::kTanh:
      return Tanh(x);
    case ActivationKind::kSigmoid:
      return Sigmoid(x);
    case ActivationKind::kIdentity:
      return x;
    case ActivationKind::kSoftmax:
      return Softmax(x);
  }
  return x;
}

absl::StatusOr<Eigen::VectorXd> DenseNetwork::Forward(
    std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_width()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input has length ", input.size(), ", network expects ", input_width()));
  }
  Eigen::RowVectorXd h =
      Eigen::Map<const Eigen::RowVectorXd>(input.data(), input.size());
  for (size_t l = 0; l < layers_.size(); ++l) {
    Eigen::RowVectorXd next = h * layers_[l].weight + layers_[l].bias;
    ApplyActivationInPlace(next, spec_.activations[l]);
    h = std::move(next);
  }
  return h.transpose();
}

absl::StatusOr<Matrix> DenseNetwork::ForwardBatch(const Matrix& input) const {
  if (input.cols() != input_width()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input batch has width ", input.cols(), ", network expects ",
        input_width()));
  }
  Matrix out(input.rows(), output_width());
  Eigen::RowVectorXd row(input.cols());
  for (Eigen::Index r = 0; r < input.rows(); ++r) {
    row = input.row(r);
    absl::StatusOr<Eigen::VectorXd> y =
        Forward(std::span<const double>(row.data(), row.size()));
    if (!y.ok()) return y.status();
    out.row(r) = y->transpose();
  }
  return out;
}

BoundParameters DenseNetwork::Bind(Tape& tape, bool trainable) const {
  BoundParameters params;
  for (const DenseLayer& layer : layers_) {
    Matrix bias = layer.bias;
    if (trainable) {
      params.weights.push_back(tape.Variable(layer.weight));
      params.biases.push_back(tape.Variable(std::move(bias)));
    } else {
      params.weights.push_back(tape.Constant(layer.weight));
      params.biases.push_back(tape.Constant(std::move(bias)));
    }
  }
  return params;
}

Var DenseNetwork::Apply(const BoundParameters& params, Var input,
                        bool apply_final_activation) const {
  Var h = input;
  for (size_t l = 0; l < layers_.size(); ++l) {
    h = AddRow(MatMul(h, params.weights[l]), params.biases[l]);
    const bool last = l + 1 == layers_.size();
    if (!last || apply_final_activation) {
      h = ApplyActivation(h, spec_.activations[l]);
    }
  }
  return h;
}

std::vector<Matrix> DenseNetwork::ParameterValues() const {
  std::vector<Matrix> out;
  for (const DenseLayer& layer : layers_) {
    out.push_back(layer.weight);
    out.push_back(layer.bias);
  }
  return out;
}

absl::Status DenseNetwork::SetParameterValues(std::span<const Matrix> values) {
  if (values.size() != 2 * layers_.size()) {
    return absl::InvalidArgumentError("parameter count mismatch");
  }
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Matrix& w = values[2 * l];
    const Matrix& b = values[2 * l + 1];
    if (w.rows() != layers_[l].weight.rows() ||
        w.cols() != layers_[l].weight.cols() || b.rows() != 1 ||
        b.cols() != layers_[l].bias.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("parameter shape mismatch in layer ", l));
    }
  }
  for (size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight = values[2 * l];
    layers_[l].bias = values[2 * l + 1].row(0);
  }
  return absl::OkStatus();
}

size_t DenseNetwork::ParameterCount() const {
  size_t n = 0;
  for (const DenseLayer& layer : layers_) {
    n += layer.weight.size() + layer.bias.size();
  }
  return n;
}

}  // namespace ganprop::nn
