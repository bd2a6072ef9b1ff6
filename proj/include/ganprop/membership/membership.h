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

#ifndef GANPROP_MEMBERSHIP_MEMBERSHIP_H_
#define GANPROP_MEMBERSHIP_MEMBERSHIP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/data/dataset.h"
#include "ganprop/gan/generator.h"

namespace ganprop::membership {

using nn::Matrix;
using data::PropertyDistribution;

struct MiaConfig {
  // Blind samples per reconstruction.
  int k = 4096;
  double lambda_p = 2.0;
  // Decision threshold; AUC evaluation sweeps it instead.
  std::optional<double> epsilon;

  absl::Status Validate() const;
};

double SquaredEuclidean(std::span<const double> a, std::span<const double> b);

struct Reconstruction {
  Eigen::RowVectorXd nearest;
  double distance = 0.0;
  int index = 0;
};

// k blind samples drawn once; Nearest(x) is the nearest-of-k reconstruction
// R(x|G) under squared Euclidean distance (first index wins ties).
class ReconstructionBank {
 public:
  static absl::StatusOr<ReconstructionBank> Create(const gan::BlindSampler& gan,
                                                   int k, uint64_t seed);
  static absl::StatusOr<ReconstructionBank> FromSamples(Matrix samples);

  absl::StatusOr<Reconstruction> Nearest(std::span<const double> x) const;
  const Matrix& samples() const { return samples_; }

 private:
  explicit ReconstructionBank(Matrix samples) : samples_(std::move(samples)) {}
  Matrix samples_;
};

absl::StatusOr<Reconstruction> Reconstruct(const gan::BlindSampler& gan,
                                           std::span<const double> x, int k,
                                           uint64_t seed);

struct MiaScore {
  int64_t id = 0;
  // L(x, R(x|G_target)).
  double raw = 0.0;
  // L(x, R(x|G_reference)).
  double reference = 0.0;
  // raw - reference.
  double calibrated = 0.0;
  // Class of x for each attribute used by the enhancement.
  std::vector<int> attribute_classes;
  bool member = false;
};

// Reconstructs x against both GANs with the same k and seed.
absl::StatusOr<MiaScore> CalibratedError(std::span<const double> x,
                                         const gan::BlindSampler& target,
                                         const gan::BlindSampler& reference,
                                         int k, uint64_t seed);

// Scores every row of `samples` against banks built once per GAN with the
// same seed; row i is identical to CalibratedError(row i, ..., seed).
absl::StatusOr<std::vector<MiaScore>> ScoreSamples(
    const Matrix& samples, const gan::BlindSampler& target,
    const gan::BlindSampler& reference, int k, uint64_t seed);

// lambda_p * mean_i(2 * P_i[c_i] - 1), where c_i is x's class for attribute i
// and P_i the inferred distribution of attribute i in the target training set.
absl::StatusOr<double> EnhancementTerm(
    std::span<const int> attribute_classes,
    std::span<const PropertyDistribution> properties, double lambda_p);

// Signed margin of the decision rule: epsilon (0 when unset) plus the
// enhancement term when `enhanced`, minus L_cal. Larger means more
// member-like, and the decision is "member" iff the margin is positive.
absl::StatusOr<double> DecisionStatistic(
    const MiaScore& score, std::span<const PropertyDistribution> properties,
    const MiaConfig& config, bool enhanced);

// member iff L_cal < epsilon (+ enhancement term when `enhanced`).
absl::StatusOr<bool> Decide(const MiaScore& score,
                            std::span<const PropertyDistribution> properties,
                            const MiaConfig& config, bool enhanced);

// Probability that a random member's statistic exceeds a random
// non-member's, ties counted half.
absl::StatusOr<double> Auc(std::span<const double> statistics,
                           std::span<const bool> members);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// ROC curve of "member iff statistic >= t" as t falls through the distinct
// statistic values, from (0, 0) to (1, 1). Tied statistics move together.
absl::StatusOr<std::vector<RocPoint>> RocCurve(std::span<const double> statistics,
                                               std::span<const bool> members);

absl::StatusOr<double> EvaluateAuc(
    std::span<const MiaScore> scores,
    std::span<const PropertyDistribution> properties, const MiaConfig& config,
    bool enhanced);

struct SweepPoint {
  double deviation = 0.0;
  // Class-1 proportion substituted for the binary attribute.
  double proportion = 0.0;
  double auc = 0.0;
};

// Enhanced AUC with the binary attribute proportion replaced by
// clamp(proportion + deviation, 0, 1) for each deviation in [-1, 1].
absl::StatusOr<std::vector<SweepPoint>> SensitivitySweep(
    std::span<const MiaScore> scores, double proportion,
    std::span<const double> deviations, const MiaConfig& config);

// Header: id,raw,reference,calibrated,margin,member
std::string ScoresCsv(std::span<const MiaScore> scores,
                      std::span<const double> margins);
std::string SweepCsv(std::span<const SweepPoint> points);
// Header: fpr,tpr
std::string RocCsv(std::span<const RocPoint> points);

}  // namespace ganprop::membership

#endif  // GANPROP_MEMBERSHIP_MEMBERSHIP_H_
