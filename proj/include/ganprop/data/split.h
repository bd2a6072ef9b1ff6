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

#ifndef GANPROP_DATA_SPLIT_H_
#define GANPROP_DATA_SPLIT_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "ganprop/data/dataset.h"

namespace ganprop::data {

struct SplitPlan {
  int target_size = 0;
  int shadow_size = 0;
  int classifier_size = 0;
  // Fraction of the classifier pool used for training; the rest is the test
  // split (7:3 by default).
  double classifier_train_fraction = 0.7;
};

struct SplitResult {
  LabeledDataset target;
  LabeledDataset shadow;
  LabeledDataset classifier_train;
  LabeledDataset classifier_test;
};

// Three disjoint pools drawn without replacement, each stratified so its
// class counts follow the input's empirical property by largest remainder.
// The classifier pool is further split train/test, again stratified.
absl::StatusOr<SplitResult> Split(const LabeledDataset& dataset,
                                  const SplitPlan& plan, uint64_t seed);

// Draws exactly LargestRemainderCounts(property, size) samples per class from
// `pool` without replacement.
absl::StatusOr<LabeledDataset> DrawWithProperty(
    const LabeledDataset& pool, int size, const PropertyDistribution& property,
    uint64_t seed);

// Adds the fewest reservoir samples such that the result's class counts equal
// LargestRemainderCounts(fake_property, new size). Every original sample is
// kept, in its original position; additions are appended.
absl::StatusOr<LabeledDataset> Rebalance(
    const LabeledDataset& dataset, const PropertyDistribution& fake_property,
    const LabeledDataset& reservoir, uint64_t seed);

// Smallest N >= current total with LargestRemainderCounts(fake, N) >= counts
// elementwise, or an error when no such N exists.
absl::StatusOr<int> MinimalRebalancedSize(std::span<const int> counts,
                                          const PropertyDistribution& fake);

}  // namespace ganprop::data

#endif  // GANPROP_DATA_SPLIT_H_
