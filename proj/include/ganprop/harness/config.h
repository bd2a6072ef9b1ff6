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

#ifndef GANPROP_HARNESS_CONFIG_H_
#define GANPROP_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/attack/attack.h"
#include "ganprop/classifier/classifier.h"
#include "ganprop/data/dataset.h"
#include "ganprop/data/synth.h"
#include "ganprop/gan/gan.h"

namespace ganprop::harness {

// Every knob of an experiment run.
//
// Text form, one entry per line:
//
//   # comment
//   key = value
//   list_key = 1, 2, 3
//
// Blank lines and '#' comments are ignored, unknown keys are rejected, and a
// later assignment overrides an earlier one. Command-line overrides use the
// same "key=value" form.
struct ExperimentConfig {
  std::string task = "t1";
  data::Domain domain = data::Domain::kMixture2d;
  int n_classes = 2;
  // Binary class-1 proportions, one target group per entry.
  std::vector<double> grid = {0.3, 0.4, 0.5, 0.6, 0.7};
  // Multi-class target distribution (n_classes > 2).
  std::vector<double> multiclass_property;
  int targets_per_property = 8;
  // Shadow property grid; empty means the target grid.
  std::vector<double> shadow_grid;
  int shadows_per_property = 20;

  int train_size = 512;
  int pool_size = 4000;
  int classifier_size = 3000;
  double classifier_train_fraction = 0.7;
  // Rotation/noise shift of the classifier's training domain.
  double domain_shift = 0.0;

  gan::GanLoss gan_loss = gan::GanLoss::kMinimax;
  gan::PriorKind latent_prior = gan::PriorKind::kGaussianStandard;
  int latent_dim = 4;
  std::vector<int> gan_hidden = {64, 64};
  int gan_steps = 2000;
  double gan_lr = 0.0005;
  double gan_beta1 = 0.5;
  double gan_beta2 = 0.999;
  int gan_batch = 100;
  int n_critic = 1;
  double gp_lambda = 10.0;
  // Targets and shadows start from the same generator weights.
  bool shared_init = true;

  std::vector<int> clf_hidden = {16};
  int clf_epochs = 20;
  double clf_lr = 0.005;
  int clf_batch = 100;

  attack::PhiMode phi = attack::PhiMode::kHard;
  int full_samples = 20000;
  std::vector<int> sample_counts = {4,   8,    16,   32,   64,   128,  256,
                                    512, 1024, 2048, 4096, 8192, 16384};
  int set_size = 100;
  int trials = 20;
  int latent_iters = 500;
  double latent_lr = 0.01;
  int starts = 5;
  std::vector<int> shadow_counts = {25, 50, 100};
  double out_of_range_property = 0.2;
  std::vector<int> compare_counts = {100};

  int mia_k = 4096;
  double mia_lambda = 2.0;
  int mia_members = 256;
  int mia_nonmembers = 768;
  double mia_property = 0.3;
  std::vector<double> mia_deviations = {-0.3, -0.2, -0.1, 0.0, 0.1, 0.2};

  bool save_models = true;
  int threads = 1;
  uint64_t seed = 0;
  std::string output_dir = "runs/t1";

  absl::Status Validate() const;

  // Applies one "key = value" assignment.
  absl::Status Set(std::string_view key, std::string_view value);
  // Applies every assignment in a config text.
  absl::Status Apply(std::string_view text);
  // Canonical text: every key, sorted, shortest round-trip numbers.
  std::string ToText() const;

  bool multiclass() const { return n_classes > 2; }
  data::AttributeSpec attribute() const {
    return data::AttributeSpec::Numbered(n_classes);
  }
  // Target distributions: the grid for binary tasks, the multi-class
  // property otherwise.
  absl::StatusOr<std::vector<data::PropertyDistribution>> TargetProperties() const;
  // Binary shadow grid points.
  absl::StatusOr<std::vector<data::PropertyDistribution>> ShadowGrid() const;

  gan::GanConfig GanConfigFor(uint64_t init_seed, uint64_t train_seed) const;
  classifier::TrainingOptions ClassifierOptions(uint64_t seed) const;
  attack::LatentOptimizationOptions LatentOptions(uint64_t seed) const;
};

absl::StatusOr<ExperimentConfig> LoadConfig(const std::filesystem::path& path);

// Splits "key=value"; whitespace around either side is dropped.
absl::StatusOr<std::pair<std::string, std::string>> ParseAssignment(
    std::string_view text);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace ganprop::harness

#endif  // GANPROP_HARNESS_CONFIG_H_
