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

#ifndef GANPROP_GAN_GENERATOR_H_
#define GANPROP_GAN_GENERATOR_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "ganprop/nn/network.h"
#include "ganprop/nn/tape.h"

namespace ganprop::gan {

using nn::Matrix;

enum class PriorKind { kGaussianStandard, kUniformPm1 };

std::string PriorKindName(PriorKind kind);
absl::StatusOr<PriorKind> ParsePriorKind(std::string_view name);

struct LatentPrior {
  PriorKind kind = PriorKind::kGaussianStandard;
  int dim = 16;

  // n x dim codes from a stream derived from `seed`; row i depends only on
  // (seed, i) and the rows before it.
  Matrix Sample(int n, uint64_t seed) const;

  friend bool operator==(const LatentPrior&, const LatentPrior&) = default;
};

// Full black-box query surface: generated samples only, latent codes hidden.
class BlindSampler {
 public:
  virtual ~BlindSampler() = default;
  virtual int sample_width() const = 0;
  virtual absl::StatusOr<Matrix> SampleBlind(int n, uint64_t seed) const = 0;
};

// Partial black-box query surface: caller supplies the latent codes.
class CodeGenerator {
 public:
  virtual ~CodeGenerator() = default;
  virtual int latent_dim() const = 0;
  virtual int sample_width() const = 0;
  virtual absl::StatusOr<Matrix> GenerateFrom(const Matrix& codes) const = 0;
};

// A trained generator network together with its latent prior. This is the
// only part of a GAN that attack code sees.
class Generator : public BlindSampler, public CodeGenerator {
 public:
  static absl::StatusOr<Generator> Create(nn::DenseNetwork network,
                                          LatentPrior prior);

  int sample_width() const override { return network_.output_width(); }
  int latent_dim() const override { return prior_.dim; }

  // GenerateFrom(prior().Sample(n, seed)).
  absl::StatusOr<Matrix> SampleBlind(int n, uint64_t seed) const override;
  // Row i equals the network's forward pass on codes row i.
  absl::StatusOr<Matrix> GenerateFrom(const Matrix& codes) const override;

  // Differentiable path with frozen weights, for gradients w.r.t. codes.
  nn::Var Apply(nn::Tape& tape, nn::Var codes) const;

  const nn::DenseNetwork& network() const { return network_; }
  const LatentPrior& prior() const { return prior_; }

 private:
  Generator(nn::DenseNetwork network, LatentPrior prior)
      : network_(std::move(network)), prior_(prior) {}

  nn::DenseNetwork network_;
  LatentPrior prior_;
};

}  // namespace ganprop::gan

#endif  // GANPROP_GAN_GENERATOR_H_
