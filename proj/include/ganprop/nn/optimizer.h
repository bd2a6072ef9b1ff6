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

#ifndef GANPROP_NN_OPTIMIZER_H_
#define GANPROP_NN_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/nn/tape.h"

namespace ganprop::nn {

enum class OptimizerKind { kSgd, kAdam };

std::string OptimizerKindName(OptimizerKind kind);
absl::StatusOr<OptimizerKind> ParseOptimizerKind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 100;

  absl::Status Validate() const;

  static OptimizerConfig Sgd(double learning_rate) {
    OptimizerConfig c;
    c.kind = OptimizerKind::kSgd;
    c.learning_rate = learning_rate;
    return c;
  }
  static OptimizerConfig Adam(double learning_rate, double beta1, double beta2) {
    OptimizerConfig c;
    c.kind = OptimizerKind::kAdam;
    c.learning_rate = learning_rate;
    c.beta1 = beta1;
    c.beta2 = beta2;
    return c;
  }

  friend bool operator==(const OptimizerConfig&,
                         const OptimizerConfig&) = default;
};

// Stateful first-order optimizer over a fixed list of parameter tensors.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  // Applies one update. A non-finite gradient aborts the step without
  // touching params and returns a DataLoss status.
  absl::Status Step(std::span<Matrix> params, std::span<const Matrix> grads);

  const OptimizerConfig& config() const { return config_; }
  int64_t steps() const { return t_; }

 private:
  OptimizerConfig config_;
  int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace ganprop::nn

#endif  // GANPROP_NN_OPTIMIZER_H_
