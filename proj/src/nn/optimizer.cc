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

#include "ganprop/nn/optimizer.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace ganprop::nn {

std::string OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

absl::StatusOr<OptimizerKind> ParseOptimizerKind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown optimizer '", std::string(name), "'"));
}

absl::Status OptimizerConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (batch_size < 1) {
    return absl::InvalidArgumentError("batch size must be >= 1");
  }
  if (kind == OptimizerKind::kAdam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      return absl::InvalidArgumentError("adam betas must lie in [0,1)");
    }
    if (!(beta1 < beta2)) {
      return absl::InvalidArgumentError("adam requires beta1 < beta2");
    }
    if (!(epsilon > 0.0)) {
      return absl::InvalidArgumentError("adam epsilon must be positive");
    }
  }
  return absl::OkStatus();
}

absl::Status Optimizer::Step(std::span<Matrix> params,
                             std::span<const Matrix> grads) {
  if (params.size() != grads.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", params.size(), " parameters but ", grads.size(), " gradients"));
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != grads[i].rows() ||
        params[i].cols() != grads[i].cols()) {
      return absl::InvalidArgumentError(
          absl::StrCat("gradient ", i, " shape does not match its parameter"));
    }
    if (!grads[i].allFinite()) {
      return absl::DataLossError(
          absl::StrCat("non-finite gradient in tensor ", i, "; step aborted"));
    }
  }

  if (config_.kind == OptimizerKind::kSgd) {
    for (size_t i = 0; i < params.size(); ++i) {
      params[i] -= config_.learning_rate * grads[i];
    }
    ++t_;
    return absl::OkStatus();
  }

  if (m_.empty()) {
    for (const Matrix& p : params) {
      m_.push_back(Matrix::Zero(p.rows(), p.cols()));
      v_.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
  } else if (m_.size() != params.size()) {
    return absl::InvalidArgumentError(
        "parameter list changed between optimizer steps");
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i].cwiseProduct(grads[i]);
    params[i].array() -= config_.learning_rate * (m_[i].array() / c1) /
                         ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
  return absl::OkStatus();
}

}  // namespace ganprop::nn
