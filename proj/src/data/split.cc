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

#include "ganprop/data/split.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ganprop/common/random.h"

namespace ganprop::data {
namespace {

std::string DeficitReport(std::span<const int> needed,
                          std::span<const int> available) {
  std::vector<std::string> parts;
  for (size_t c = 0; c < needed.size(); ++c) {
    if (needed[c] > available[c]) {
      parts.push_back(absl::StrCat("class ", c, " needs ", needed[c], ", has ",
                                   available[c], " (deficit ",
                                   needed[c] - available[c], ")"));
    }
  }
  return absl::StrJoin(parts, "; ");
}

// Stratified take: for each class, consume counts[c] entries from the front
// of by_class[c] (advancing cursor[c]).
std::vector<int> Take(const std::vector<std::vector<int>>& by_class,
                      std::span<const int> counts, std::vector<int>& cursor) {
  std::vector<int> rows;
  for (size_t c = 0; c < counts.size(); ++c) {
    for (int i = 0; i < counts[c]; ++i) rows.push_back(by_class[c][cursor[c]++]);
  }
  return rows;
}

}  // namespace

absl::StatusOr<SplitResult> Split(const LabeledDataset& dataset,
                                  const SplitPlan& plan, uint64_t seed) {
  if (plan.target_size < 0 || plan.shadow_size < 0 || plan.classifier_size < 0) {
    return absl::InvalidArgumentError("split sizes must be non-negative");
  }
  if (!(plan.classifier_train_fraction > 0.0 &&
        plan.classifier_train_fraction < 1.0)) {
    return absl::InvalidArgumentError("classifier train fraction must be in (0,1)");
  }
  const int total = plan.target_size + plan.shadow_size + plan.classifier_size;
  if (total > dataset.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "split plan needs ", total, " samples but dataset has ", dataset.size(),
        " (deficit ", total - dataset.size(), ")"));
  }
  const PropertyDistribution property = dataset.EmpiricalProperty();
  const std::vector<int> target_counts =
      LargestRemainderCounts(property, plan.target_size);
  const std::vector<int> shadow_counts =
      LargestRemainderCounts(property, plan.shadow_size);
  const std::vector<int> clf_counts =
      LargestRemainderCounts(property, plan.classifier_size);
  const std::vector<int> available = dataset.ClassCounts();
  std::vector<int> needed(available.size());
  for (size_t c = 0; c < needed.size(); ++c) {
    needed[c] = target_counts[c] + shadow_counts[c] + clf_counts[c];
  }
  if (const std::string report = DeficitReport(needed, available);
      !report.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("insufficient samples per class: ", report));
  }

  Rng rng(DeriveSeed(seed, "split"));
  std::vector<std::vector<int>> by_class = dataset.RowsByClass();
  for (auto& rows : by_class) std::shuffle(rows.begin(), rows.end(), rng);
  std::vector<int> cursor(by_class.size(), 0);

  auto finish = [&](std::vector<int> rows) {
    std::shuffle(rows.begin(), rows.end(), rng);
    return dataset.Subset(rows);
  };
  SplitResult out;
  out.target = finish(Take(by_class, target_counts, cursor));
  out.shadow = finish(Take(by_class, shadow_counts, cursor));

  // Train/test inside the classifier pool.
  const PropertyDistribution clf_property =
      plan.classifier_size > 0
          ? *PropertyDistribution::FromCounts(clf_counts)
          : property;
  const int train_size = static_cast<int>(
      std::lround(plan.classifier_train_fraction * plan.classifier_size));
  std::vector<int> train_counts = LargestRemainderCounts(clf_property, train_size);
  std::vector<int> test_counts(clf_counts.size());
  for (size_t c = 0; c < clf_counts.size(); ++c) {
    train_counts[c] = std::min(train_counts[c], clf_counts[c]);
    test_counts[c] = clf_counts[c] - train_counts[c];
  }
  out.classifier_train = finish(Take(by_class, train_counts, cursor));
  out.classifier_test = finish(Take(by_class, test_counts, cursor));
  return out;
}

absl::StatusOr<LabeledDataset> DrawWithProperty(
    const LabeledDataset& pool, int size, const PropertyDistribution& property,
    uint64_t seed) {
  if (property.size() != pool.attribute.n_classes) {
    return absl::InvalidArgumentError("property length != pool class count");
  }
  if (size < 0) return absl::InvalidArgumentError("size must be non-negative");
  const std::vector<int> counts = LargestRemainderCounts(property, size);
  const std::vector<int> available = pool.ClassCounts();
  if (const std::string report = DeficitReport(counts, available);
      !report.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("pool cannot realize property: ", report));
  }
  Rng rng(DeriveSeed(seed, "draw_with_property"));
  std::vector<std::vector<int>> by_class = pool.RowsByClass();
  std::vector<int> rows;
  for (size_t c = 0; c < by_class.size(); ++c) {
    std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
    rows.insert(rows.end(), by_class[c].begin(), by_class[c].begin() + counts[c]);
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return pool.Subset(rows);
}

absl::StatusOr<int> MinimalRebalancedSize(std::span<const int> counts,
                                          const PropertyDistribution& fake) {
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  // With N >= counts[c] / fake[c] for every class, floor(fake[c] * N) already
  // covers counts[c], so the scan below is bounded.
  double bound = n;
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    if (fake[static_cast<int>(c)] <= 0.0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "fake property gives class ", c, " zero mass but the dataset holds ",
          counts[c], " such samples; rebalancing is additive only"));
    }
    bound = std::max(bound, std::ceil(counts[c] / fake[static_cast<int>(c)]) + 1);
  }
  for (int size = n; size <= static_cast<int>(bound); ++size) {
    const std::vector<int> t = LargestRemainderCounts(fake, size);
    bool ok = true;
    for (size_t c = 0; c < counts.size() && ok; ++c) ok = t[c] >= counts[c];
    if (ok) return size;
  }
  return absl::InternalError("rebalanced size search did not terminate");
}

absl::StatusOr<LabeledDataset> Rebalance(
    const LabeledDataset& dataset, const PropertyDistribution& fake_property,
    const LabeledDataset& reservoir, uint64_t seed) {
  if (fake_property.size() != dataset.attribute.n_classes ||
      reservoir.attribute.n_classes != dataset.attribute.n_classes) {
    return absl::InvalidArgumentError("class count mismatch in rebalance");
  }
  if (reservoir.size() > 0 && reservoir.width() != dataset.width()) {
    return absl::InvalidArgumentError("reservoir sample width differs");
  }
  const std::vector<int> counts = dataset.ClassCounts();
  absl::StatusOr<int> size = MinimalRebalancedSize(counts, fake_property);
  if (!size.ok()) return size.status();
  const std::vector<int> target = LargestRemainderCounts(fake_property, *size);
  std::vector<int> extra(counts.size());
  for (size_t c = 0; c < counts.size(); ++c) extra[c] = target[c] - counts[c];
  if (const std::string report = DeficitReport(extra, reservoir.ClassCounts());
      !report.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("reservoir too small for rebalancing to ", *size,
                     " samples: ", report));
  }
  if (*size == dataset.size()) return dataset;

  Rng rng(DeriveSeed(seed, "rebalance"));
  std::vector<std::vector<int>> by_class = reservoir.RowsByClass();
  std::vector<int> rows;
  for (size_t c = 0; c < by_class.size(); ++c) {
    std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
    rows.insert(rows.end(), by_class[c].begin(), by_class[c].begin() + extra[c]);
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return Concatenate(dataset, reservoir.Subset(rows));
}

}  // namespace ganprop::data
