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

#ifndef GANPROP_HARNESS_PIPELINE_H_
#define GANPROP_HARNESS_PIPELINE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/attack/attack.h"
#include "ganprop/classifier/classifier.h"
#include "ganprop/data/dataset.h"
#include "ganprop/gan/gan.h"
#include "ganprop/harness/config.h"
#include "ganprop/harness/results.h"
#include "ganprop/membership/membership.h"

namespace ganprop::harness {

// Disjoint sample pools carved from one uniform corpus, plus a separately
// synthesized reservoir for rebalancing and reference models. Ids are unique
// across all five pools.
struct DataPools {
  data::LabeledDataset target;
  data::LabeledDataset shadow;
  data::LabeledDataset classifier_train;
  data::LabeledDataset classifier_test;
  data::LabeledDataset reservoir;
};

absl::StatusOr<DataPools> BuildPools(const ExperimentConfig& config);

struct ModelRecord {
  std::string id;
  data::PropertyDistribution property;
  gan::Generator generator;
  data::LabeledDataset training;
};

// property.json sidecar of a saved model directory.
absl::Status WriteModelProperty(const std::filesystem::path& dir,
                                const data::PropertyDistribution& property);
absl::StatusOr<data::PropertyDistribution> ReadModelProperty(
    const std::filesystem::path& dir);

// Lazily built, cached artifacts of one run directory. Saved models are
// reused only when the directory's config.txt matches the current config.
class Experiment {
 public:
  // Validates the config, creates the output directory and writes
  // config.txt.
  static absl::StatusOr<Experiment> Create(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const std::filesystem::path& dir() const { return dir_; }

  absl::StatusOr<const DataPools*> Pools();
  absl::StatusOr<const classifier::PropertyClassifier*> Classifier();
  // targets_per_property models per target property, ids target_<i>.
  absl::StatusOr<const std::vector<ModelRecord>*> Targets();
  // shadows_per_property models per shadow grid point, assigned round-robin,
  // ids shadow_<k>. Binary tasks only.
  absl::StatusOr<const std::vector<ModelRecord>*> Shadows();
  // The first `members` shadows.
  absl::StatusOr<attack::ShadowEnsemble> Ensemble(int members);

  // Trains one GAN per dataset under models/<role>/<role>_<i>. Weight init is
  // shared across all models when shared_init is set.
  absl::StatusOr<std::vector<ModelRecord>> TrainModels(
      const std::string& role, std::vector<data::LabeledDataset> datasets,
      std::vector<data::PropertyDistribution> properties);
  // Draws train_size samples per property from `pool`, then trains.
  absl::StatusOr<std::vector<ModelRecord>> DrawAndTrain(
      const std::string& role, const data::LabeledDataset& pool,
      const std::vector<data::PropertyDistribution>& properties);

  // Codes optimized on `ensemble` from the stream (label, index).
  absl::StatusOr<attack::LatentCodeSet> OptimizeCodes(
      const attack::ShadowEnsemble& ensemble, const std::string& label,
      uint64_t index);

  // `trials` full black-box attacks of `samples` queries on every model.
  absl::StatusOr<std::vector<ResultRow>> FullRows(
      const std::vector<ModelRecord>& models, int samples, int trials,
      const std::string& mode);
  // One partial black-box attack per model with `codes`.
  absl::StatusOr<std::vector<ResultRow>> PartialRows(
      const std::vector<ModelRecord>& models, const attack::LatentCodeSet& codes,
      uint64_t codes_seed, int trial, const std::string& mode);

  ResultRow MakeRow(const std::string& mode, const std::string& target_id,
                    const data::PropertyDistribution& real,
                    const data::PropertyDistribution& inferred, double abs_diff,
                    int query_count, int trial, uint64_t seed) const;

 private:
  Experiment(ExperimentConfig config, std::filesystem::path dir, bool reuse)
      : config_(std::move(config)), dir_(std::move(dir)), reuse_(reuse) {}

  ExperimentConfig config_;
  std::filesystem::path dir_;
  bool reuse_ = false;
  std::optional<DataPools> pools_;
  std::optional<classifier::PropertyClassifier> classifier_;
  std::optional<std::vector<ModelRecord>> targets_;
  std::optional<std::vector<ModelRecord>> shadows_;
};

// Trains targets, classifier and (binary tasks) shadows, runs the full
// black-box attack `trials` times per target and the partial black-box
// attack once per target, and writes config.txt, models/, results.csv and
// results.csv.sha256. On failure the error names the stage, and the rows
// collected so far are still written along with failure.txt.
absl::StatusOr<std::vector<ResultRow>> RunTask(const ExperimentConfig& config);

inline constexpr const char* kFigureIds[] = {"f4",  "f5",  "f6",  "f7",
                                             "f8",  "f9",  "f10", "f14",
                                             "f15", "f16", "f17"};

struct FigureResult {
  std::vector<ResultRow> rows;
  // figure_<id>.csv
  std::string csv;
  // figure_<id>_<name>.csv
  std::map<std::string, std::string> extras;
};

// Builds what the figure needs, then writes results_<id>.csv (+ .sha256),
// figure_<id>.csv and any extras under the run directory.
absl::StatusOr<FigureResult> RunFigure(Experiment& experiment,
                                       const std::string& id);
absl::StatusOr<FigureResult> RunFigure(const ExperimentConfig& config,
                                       const std::string& id);

struct MiaOutcome {
  std::vector<membership::MiaScore> scores;
  data::PropertyDistribution true_property;
  data::PropertyDistribution inferred_property;
  double auc_baseline = 0.0;
  double auc_enhanced_true = 0.0;
  double auc_enhanced_inferred = 0.0;
  // Enhanced AUC with P = 0.5 substituted.
  double auc_half = 0.0;
  std::vector<membership::SweepPoint> sweep;
  ResultRow inference_row;
};

// Target GAN on mia_members samples at mia_property; non-members at 0.5 from
// the shadow pool; reference GAN on reservoir samples at 0.5.
absl::StatusOr<MiaOutcome> RunMia(Experiment& experiment);

}  // namespace ganprop::harness

#endif  // GANPROP_HARNESS_PIPELINE_H_
