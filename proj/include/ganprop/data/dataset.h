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

#ifndef GANPROP_DATA_DATASET_H_
#define GANPROP_DATA_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ganprop::data {

using Matrix = Eigen::MatrixXd;

enum class Domain { kMixture2d, kDigitLike, kTabularOneHot };

std::string DomainName(Domain domain);
absl::StatusOr<Domain> ParseDomain(std::string_view name);

struct AttributeSpec {
  int n_classes = 2;
  std::vector<std::string> class_names;

  absl::Status Validate() const;

  // Class names "0", "1", ... .
  static AttributeSpec Numbered(int n_classes);
  static AttributeSpec Binary() { return Numbered(2); }

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

// Probability vector over attribute classes. In the binary case the property
// is conventionally quoted as the proportion of class 1.
class PropertyDistribution {
 public:
  PropertyDistribution() = default;

  // Entries must lie in [0,1] and sum to 1 within 1e-9.
  static absl::StatusOr<PropertyDistribution> Create(std::vector<double> probs);
  // {1 - p, p}; p must lie in [0,1].
  static absl::StatusOr<PropertyDistribution> Binary(double p);
  static PropertyDistribution Uniform(int n_classes);
  // Normalized counts; at least one count must be positive.
  static absl::StatusOr<PropertyDistribution> FromCounts(
      std::span<const int> counts);

  const std::vector<double>& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int c) const { return probs_[c]; }
  // Proportion of class 1; only meaningful for binary distributions.
  double proportion() const { return probs_.at(1); }
  bool is_binary() const { return probs_.size() == 2; }

  friend bool operator==(const PropertyDistribution&,
                         const PropertyDistribution&) = default;

 private:
  explicit PropertyDistribution(std::vector<double> probs)
      : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

// Integer class counts summing to n that realize `property`: floors first,
// then the leftover units go to the largest fractional parts, ties to the
// lower class index.
std::vector<int> LargestRemainderCounts(const PropertyDistribution& property,
                                        int n);

struct LabeledDataset {
  // One sample per row, every coordinate in [-1, 1].
  Matrix samples;
  std::vector<int> labels;
  // Provenance: index of each sample in the corpus it was synthesized into.
  std::vector<int64_t> ids;
  Domain domain = Domain::kMixture2d;
  AttributeSpec attribute;

  int size() const { return static_cast<int>(labels.size()); }
  int width() const { return static_cast<int>(samples.cols()); }
  std::vector<int> ClassCounts() const;
  PropertyDistribution EmpiricalProperty() const;
  // Rows in the given order.
  LabeledDataset Subset(std::span<const int> rows) const;
  // Per-class row indices in original order.
  std::vector<std::vector<int>> RowsByClass() const;
};

LabeledDataset Concatenate(const LabeledDataset& a, const LabeledDataset& b);

}  // namespace ganprop::data

#endif  // GANPROP_DATA_DATASET_H_
