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

#ifndef GANPROP_GAN_GAN_H_
#define GANPROP_GAN_GAN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/data/dataset.h"
#include "ganprop/gan/generator.h"
#include "ganprop/nn/network.h"
#include "ganprop/nn/optimizer.h"
#include "json.hpp"

namespace ganprop::gan {

enum class GanLoss { kMinimax, kWganGp };

std::string GanLossName(GanLoss loss);
absl::StatusOr<GanLoss> ParseGanLoss(std::string_view name);

struct GanConfig {
  nn::DenseNetworkSpec generator;
  nn::DenseNetworkSpec discriminator;
  LatentPrior prior;
  GanLoss loss = GanLoss::kWganGp;
  double gp_lambda = 10.0;
  int n_critic = 3;
  int batch_size = 100;
  nn::OptimizerConfig generator_optimizer;
  nn::OptimizerConfig discriminator_optimizer;
  // Number of generator updates.
  int train_steps = 1000;
  // Drives batch order, latent draws and gradient-penalty interpolation.
  // Weight initialization comes from the network specs' own seeds.
  uint64_t seed = 0;

  absl::Status Validate() const;

  // WGAN-GP recipe: lambda = 10, n_critic = 3, m = 100,
  // Adam(alpha = 0.0002, beta1 = 0.9, beta2 = 0.999). Dense stand-ins with
  // leaky ReLU (0.2) hidden layers, tanh generator output, linear critic head.
  static GanConfig WganGpDefaults(int latent_dim, int sample_width,
                                  std::vector<int> hidden = {64, 64},
                                  uint64_t init_seed = 0);
  // DCGAN recipe: minimax loss, n_critic = 1, m = 100,
  // Adam(alpha = 0.0002, beta1 = 0.5, beta2 = 0.999), sigmoid head.
  static GanConfig MinimaxDefaults(int latent_dim, int sample_width,
                                   std::vector<int> hidden = {64, 64},
                                   uint64_t init_seed = 0);
};

nlohmann::json GanConfigToJson(const GanConfig& config);
absl::StatusOr<GanConfig> GanConfigFromJson(const nlohmann::json& j);

struct TrainingStep {
  int step = 0;
  double discriminator_loss = 0.0;
  double generator_loss = 0.0;
  // Mean gradient-penalty term of the step's last critic update (0 for
  // minimax).
  double gradient_penalty = 0.0;
};

struct TrainingLog {
  std::vector<TrainingStep> steps;
  bool failed = false;
  std::string failure;
};

struct TrainedGan {
  nn::DenseNetwork generator;
  nn::DenseNetwork discriminator;
  GanConfig config;
  TrainingLog log;

  // Attack-facing surface: generator and prior only.
  Generator AsGenerator() const;
};

// Runs config.train_steps generator updates, each preceded by n_critic
// discriminator updates. A non-finite loss or gradient stops training early;
// the partially trained models are returned with log.failed set.
absl::StatusOr<TrainedGan> TrainGan(const data::LabeledDataset& dataset,
                                    const GanConfig& config);

// Directory layout: generator.json, discriminator.json, config.json,
// training_log.csv.
absl::Status SaveGan(const TrainedGan& gan, const std::filesystem::path& dir);
absl::StatusOr<TrainedGan> LoadGan(const std::filesystem::path& dir);
// Reads only generator.json and the prior from config.json.
absl::StatusOr<Generator> LoadGenerator(const std::filesystem::path& dir);

}  // namespace ganprop::gan

#endif  // GANPROP_GAN_GAN_H_
