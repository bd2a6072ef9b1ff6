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

#ifndef GANPROP_ATTACK_ATTACK_H_
#define GANPROP_ATTACK_ATTACK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/classifier/classifier.h"
#include "ganprop/data/dataset.h"
#include "ganprop/gan/generator.h"
#include "ganprop/nn/optimizer.h"
#include "ganprop/nn/tape.h"
#include "json.hpp"

namespace ganprop::attack {

using nn::Matrix;
using data::PropertyDistribution;

enum class PhiMode { kHard, kSoft };

std::string PhiModeName(PhiMode mode);
absl::StatusOr<PhiMode> ParsePhiMode(std::string_view name);

// Summarizes classifier output rows into a property distribution. Hard mode
// counts argmax labels (ties to the largest index); soft mode averages rows.
absl::StatusOr<PropertyDistribution> Phi(const Matrix& label_probs,
                                         PhiMode mode);

// Differentiable soft summary: 1 x n_classes mean of the classifier's
// probability rows for `samples`, classifier weights frozen.
nn::Var SoftPhi(nn::Tape& tape, const classifier::PropertyClassifier& clf,
                nn::Var samples);

// |p1 - q1| for binary distributions, total variation otherwise.
absl::StatusOr<double> AbsDiff(const PropertyDistribution& inferred,
                               const PropertyDistribution& real);
absl::StatusOr<double> CosineSimilarity(std::span<const double> a,
                                        std::span<const double> b);

enum class CodeOrigin { kRandom, kOptimized };

struct LatentCodeSet {
  Matrix codes;
  CodeOrigin origin = CodeOrigin::kRandom;
  // Loss at each visited iterate; trace[0] is the initial loss.
  std::vector<double> trace;
  double initial_loss = 0.0;
  // Loss of the returned codes (best visited iterate).
  double final_loss = 0.0;
  bool failed = false;
  std::string failure;
  // Euclidean norms of the returned codes.
  double mean_norm = 0.0;
  double max_norm = 0.0;

  int size() const { return static_cast<int>(codes.rows()); }
  int dim() const { return static_cast<int>(codes.cols()); }
};

LatentCodeSet RandomCodes(const gan::LatentPrior& prior, int n, uint64_t seed);

struct ShadowMember {
  gan::Generator generator;
  PropertyDistribution property;
  std::string id;
};

struct ShadowEnsemble {
  std::vector<ShadowMember> members;

  int size() const { return static_cast<int>(members.size()); }
  // Nonempty, one shared latent dim and sample width.
  absl::Status Validate() const;
};

// Member k is assigned grid[k % grid.size()], so every grid point receives
// floor(M / |grid|) or one more member.
std::vector<PropertyDistribution> ShadowGridProperties(
    std::span<const PropertyDistribution> grid, int members);
// Fails unless member counts per grid point differ by at most one and every
// member's property is a grid point.
absl::Status CheckGridBalance(const ShadowEnsemble& ensemble,
                              std::span<const PropertyDistribution> grid);

enum class AttackMode { kFullBlackBox, kPartialBlackBox };

std::string AttackModeName(AttackMode mode);

struct AttackReport {
  PropertyDistribution inferred;
  std::optional<PropertyDistribution> real;
  std::optional<double> abs_diff;
  std::optional<double> cosine;
  int query_count = 0;
  AttackMode mode = AttackMode::kFullBlackBox;
  PhiMode phi = PhiMode::kHard;
  uint64_t seed = 0;
  std::string target_id;
  std::string classifier_id;

  // Fills real, abs_diff and cosine.
  absl::Status SetGroundTruth(const PropertyDistribution& truth);
  nlohmann::json ToJson() const;
};

// phi(f_P(G(z_i))) over n blind samples.
absl::StatusOr<AttackReport> AttackFullBb(
    const gan::BlindSampler& target, const classifier::PropertyClassifier& clf,
    int n_samples, uint64_t seed, PhiMode phi = PhiMode::kHard);

// phi(f_P(G(z*_i))) over caller-chosen codes.
absl::StatusOr<AttackReport> AttackPartialBb(
    const gan::CodeGenerator& target, const classifier::PropertyClassifier& clf,
    const LatentCodeSet& codes, PhiMode phi = PhiMode::kHard);

struct LatentOptimizationOptions {
  nn::OptimizerConfig optimizer = nn::OptimizerConfig::Adam(0.01, 0.9, 0.999);
  int iters = 500;
  // Stop once the best loss improved by less than min_improvement over the
  // last `patience` iterations.
  int patience = 50;
  double min_improvement = 1e-6;
  int set_size = 100;
  uint64_t seed = 0;
};

// Sum over members of ||SoftPhi(G_k(codes)) - P_k||^2.
absl::StatusOr<double> EnsembleLoss(const ShadowEnsemble& ensemble,
                                    const classifier::PropertyClassifier& clf,
                                    const Matrix& codes);

// Adam on the codes with generator and classifier weights frozen. Without
// `init` the start is a prior draw of options.set_size codes. Returns the
// best visited codes, so final_loss <= initial_loss; a non-finite loss stops
// the run with `failed` set.
absl::StatusOr<LatentCodeSet> OptimizeLatentSet(
    const ShadowEnsemble& ensemble, const classifier::PropertyClassifier& clf,
    const LatentOptimizationOptions& options,
    std::optional<LatentCodeSet> init = std::nullopt);

struct AttackTarget {
  const gan::Generator* generator = nullptr;
  PropertyDistribution real;
  std::string id;
};

// One row per (target, mode, sample count, trial).
struct ComparisonRecord {
  std::string target_id;
  AttackMode mode = AttackMode::kFullBlackBox;
  int sample_count = 0;
  int trial = 0;
  double real = 0.0;
  double inferred = 0.0;
  double abs_diff = 0.0;
};

struct ModeComparison {
  int sample_count = 0;
  int wins = 0;
  int comparisons = 0;
  // wins / comparisons; a tie is not a win.
  double ratio = 0.0;
};

struct ModeComparisonResult {
  std::vector<ModeComparison> summary;
  std::vector<ComparisonRecord> records;
};

// For each sample count, optimizes one code set on the ensemble and runs the
// partial attack once per target with it, then runs the full attack `trials`
// times per target on fresh blind draws.
absl::StatusOr<ModeComparisonResult> CompareModes(
    std::span<const AttackTarget> targets,
    const classifier::PropertyClassifier& clf, const ShadowEnsemble& ensemble,
    std::span<const int> sample_counts, int trials,
    const LatentOptimizationOptions& options, uint64_t seed);

// Strict-win ratio of paired errors.
double WinRatio(std::span<const double> optimized_errors,
                std::span<const double> random_errors);

}  // namespace ganprop::attack

#endif  // GANPROP_ATTACK_ATTACK_H_
