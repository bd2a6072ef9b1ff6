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

#include "ganprop/data/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace ganprop::data {

std::string DomainName(Domain domain) {
  switch (domain) {
    case Domain::kMixture2d:
      return "mixture2d";
    case Domain::kDigitLike:
      return "digitlike";
    case Domain::kTabularOneHot:
      return "tabular_onehot";
  }
  return "unknown";
}

absl::StatusOr<Domain> ParseDomain(std::string_view name) {
  for (Domain d :
       {Domain::kMixture2d, Domain::kDigitLike, Domain::kTabularOneHot}) {
    if (DomainName(d) == name) return d;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown domain tag '", std::string(name), "'"));
}

absl::Status AttributeSpec::Validate() const {
  if (n_classes < 2) {
    return absl::InvalidArgumentError("attribute needs at least 2 classes");
  }
  if (!class_names.empty() &&
      static_cast<int>(class_names.size()) != n_classes) {
    return absl::InvalidArgumentError("class_names length != n_classes");
  }
  return absl::OkStatus();
}

AttributeSpec AttributeSpec::Numbered(int n_classes) {
  AttributeSpec spec;
  spec.n_classes = n_classes;
  for (int c = 0; c < n_classes; ++c) spec.class_names.push_back(std::to_string(c));
  return spec;
}

absl::StatusOr<PropertyDistribution> PropertyDistribution::Create(
    std::vector<double> probs) {
  if (probs.size() < 2) {
    return absl::InvalidArgumentError("property needs at least 2 classes");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("property entry ", p, " outside [0,1]"));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("property sums to ", sum, ", expected 1"));
  }
  return PropertyDistribution(std::move(probs));
}

absl::StatusOr<PropertyDistribution> PropertyDistribution::Binary(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("binary property ", p, " outside [0,1]"));
  }
  return PropertyDistribution({1.0 - p, p});
}

PropertyDistribution PropertyDistribution::Uniform(int n_classes) {
  return PropertyDistribution(
      std::vector<double>(n_classes, 1.0 / static_cast<double>(n_classes)));
}

absl::StatusOr<PropertyDistribution> PropertyDistribution::FromCounts(
    std::span<const int> counts) {
  const long total = std::accumulate(counts.begin(), counts.end(), 0L);
  if (total <= 0 || counts.size() < 2) {
    return absl::InvalidArgumentError("counts must have a positive total");
  }
  std::vector<double> probs;
  for (int c : counts) probs.push_back(static_cast<double>(c) / total);
  return PropertyDistribution(std::move(probs));
}

std::vector<int> LargestRemainderCounts(const PropertyDistribution& property,
                                        int n) {
  const int k = property.size();
  std::vector<int> counts(k);
  std::vector<double> rem(k);
  int assigned = 0;
  for (int c = 0; c < k; ++c) {
    const double exact = property[c] * n;
    counts[c] = static_cast<int>(std::floor(exact));
    rem[c] = exact - counts[c];
    assigned += counts[c];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b]; });
  for (int i = 0; assigned < n; i = (i + 1) % k) {
    ++counts[order[i]];
    ++assigned;
  }
  // Rounding noise in the probabilities can only overshoot by a unit or two.
  for (int i = k - 1; assigned > n; i = (i + k - 1) % k) {
    if (counts[order[i]] > 0) {
      --counts[order[i]];
      --assigned;
    }
  }
  return counts;
}

std::vector<int> LabeledDataset::ClassCounts() const {
  std::vector<int> counts(attribute.n_classes, 0);
  for (int l : labels) ++counts[l];
  return counts;
}

PropertyDistribution LabeledDataset::EmpiricalProperty() const {
  const std::vector<int> counts = ClassCounts();
  absl::StatusOr<PropertyDistribution> p = PropertyDistribution::FromCounts(counts);
  return p.ok() ? *p : PropertyDistribution::Uniform(attribute.n_classes);
}

LabeledDataset LabeledDataset::Subset(std::span<const int> rows) const {
  LabeledDataset out;
  out.domain = domain;
  out.attribute = attribute;
  out.samples.resize(static_cast<Eigen::Index>(rows.size()), samples.cols());
  out.labels.reserve(rows.size());
  out.ids.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.samples.row(static_cast<Eigen::Index>(i)) = samples.row(rows[i]);
    out.labels.push_back(labels[rows[i]]);
    out.ids.push_back(ids[rows[i]]);
  }
  return out;
}

std::vector<std::vector<int>> LabeledDataset::RowsByClass() const {
  std::vector<std::vector<int>> by_class(attribute.n_classes);
  for (int r = 0; r < size(); ++r) by_class[labels[r]].push_back(r);
  return by_class;
}

LabeledDataset Concatenate(const LabeledDataset& a, const LabeledDataset& b) {
  LabeledDataset out;
  out.domain = a.domain;
  out.attribute = a.attribute;
  out.samples.resize(a.samples.rows() + b.samples.rows(),
                     std::max(a.samples.cols(), b.samples.cols()));
  if (a.size() > 0) out.samples.topRows(a.samples.rows()) = a.samples;
  if (b.size() > 0) out.samples.bottomRows(b.samples.rows()) = b.samples;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.ids = a.ids;
  out.ids.insert(out.ids.end(), b.ids.begin(), b.ids.end());
  return out;
}

}  // namespace ganprop::data
