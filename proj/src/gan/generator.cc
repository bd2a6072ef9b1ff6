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

#include "ganprop/gan/generator.h"

#include <random>

#include "absl/strings/str_cat.h"
#include "ganprop/common/random.h"

namespace ganprop::gan {

std::string PriorKindName(PriorKind kind) {
  return kind == PriorKind::kGaussianStandard ? "gaussian_standard"
                                              : "uniform_pm1";
}

absl::StatusOr<PriorKind> ParsePriorKind(std::string_view name) {
  if (name == "gaussian_standard") return PriorKind::kGaussianStandard;
  if (name == "uniform_pm1") return PriorKind::kUniformPm1;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown latent prior '", std::string(name), "'"));
}

Matrix LatentPrior::Sample(int n, uint64_t seed) const {
  Rng rng(DeriveSeed(seed, "latent_prior"));
  Matrix codes(n, dim);
  if (kind == PriorKind::kGaussianStandard) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < dim; ++c) codes(r, c) = dist(rng);
    }
  } else {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < dim; ++c) codes(r, c) = dist(rng);
    }
  }
  return codes;
}

absl::StatusOr<Generator> Generator::Create(nn::DenseNetwork network,
                                            LatentPrior prior) {
  if (prior.dim < 1) {
    return absl::InvalidArgumentError("latent dim must be >= 1");
  }
  if (network.input_width() != prior.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "generator input width ", network.input_width(),
        " does not match latent dim ", prior.dim));
  }
  return Generator(std::move(network), prior);
}

absl::StatusOr<Matrix> Generator::SampleBlind(int n, uint64_t seed) const {
  if (n < 1) return absl::InvalidArgumentError("sample count must be >= 1");
  return GenerateFrom(prior_.Sample(n, seed));
}

absl::StatusOr<Matrix> Generator::GenerateFrom(const Matrix& codes) const {
  if (codes.cols() != prior_.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "latent codes have length ", codes.cols(), ", generator expects ",
        prior_.dim));
  }
  return network_.ForwardBatch(codes);
}

nn::Var Generator::Apply(nn::Tape& tape, nn::Var codes) const {
  return network_.Apply(network_.Bind(tape, /*trainable=*/false), codes);
}

}  // namespace ganprop::gan
