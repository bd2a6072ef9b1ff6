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

#ifndef GANPROP_CLASSIFIER_CLASSIFIER_H_
#define GANPROP_CLASSIFIER_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/data/dataset.h"
#include "ganprop/nn/network.h"
#include "ganprop/nn/optimizer.h"

namespace ganprop::classifier {

using nn::Matrix;

// Labels generated samples with respect to the target attribute.
//
// The network ends either in an n_classes-wide softmax or, for binary
// attributes, a 1-wide sigmoid giving P(class 1). Both heads are exposed as
// n_classes-wide probability rows.
class PropertyClassifier {
 public:
  static absl::StatusOr<PropertyClassifier> Create(nn::DenseNetwork network,
                                                   data::AttributeSpec attribute,
                                                   double test_accuracy = 0.0);

  // n x n_classes probability rows. Deterministic and row-wise.
  absl::StatusOr<Matrix> PredictProba(const Matrix& samples) const;
  // Argmax of each probability row; ties go to the largest tied class index,
  // so a binary 0.5 resolves to class 1.
  absl::StatusOr<std::vector<int>> PredictHard(const Matrix& samples) const;

  // Fraction of correct hard predictions.
  absl::StatusOr<double> Accuracy(const data::LabeledDataset& dataset) const;

  const nn::DenseNetwork& network() const { return network_; }
  const data::AttributeSpec& attribute() const { return attribute_; }
  int n_classes() const { return attribute_.n_classes; }
  int input_width() const { return network_.input_width(); }
  bool sigmoid_head() const { return sigmoid_head_; }
  double test_accuracy() const { return test_accuracy_; }
  void set_test_accuracy(double accuracy) { test_accuracy_ = accuracy; }

 private:
  PropertyClassifier(nn::DenseNetwork network, data::AttributeSpec attribute,
                     double test_accuracy, bool sigmoid_head)
      : network_(std::move(network)),
        attribute_(std::move(attribute)),
        test_accuracy_(test_accuracy),
        sigmoid_head_(sigmoid_head) {}

  nn::DenseNetwork network_;
  data::AttributeSpec attribute_;
  double test_accuracy_ = 0.0;
  bool sigmoid_head_ = false;
};

// Index of the maximum entry; ties go to the largest tied index.
int ArgmaxLastTie(std::span<const double> probs);

// Softmax classifier layout: input -> hidden (leaky ReLU 0.2) -> n_classes.
nn::DenseNetworkSpec DefaultClassifierSpec(int input_width, int n_classes,
                                           std::vector<int> hidden = {64},
                                           uint64_t seed = 0);

struct TrainingOptions {
  nn::OptimizerConfig optimizer = nn::OptimizerConfig::Adam(0.005, 0.9, 0.999);
  int epochs = 20;
  uint64_t seed = 0;
};

struct ClassifierTrainingResult {
  PropertyClassifier classifier;
  // Mean cross-entropy per epoch.
  std::vector<double> epoch_losses;
  bool failed = false;
  std::string failure;
};

// Minibatch cross-entropy training. The output layer starts at zero, so an
// untrained classifier predicts the uniform distribution. Test accuracy is
// measured on `test` after the last epoch. A non-finite loss stops training
// and is reported through `failed`.
absl::StatusOr<ClassifierTrainingResult> TrainClassifier(
    const data::LabeledDataset& train, const data::LabeledDataset& test,
    const nn::DenseNetworkSpec& spec, const TrainingOptions& options);

// Rejects datasets that share a provenance id.
absl::Status CheckDisjointProvenance(const data::LabeledDataset& a,
                                     const data::LabeledDataset& b);

// Indices (in original order) of the largest subset of `samples` whose
// predicted-label counts equal LargestRemainderCounts(fake_property, size).
// Within a class the earliest samples are kept.
absl::StatusOr<std::vector<int>> GateReleaseRows(
    const PropertyClassifier& classifier, const Matrix& samples,
    const data::PropertyDistribution& fake_property);
absl::StatusOr<Matrix> GateRelease(
    const PropertyClassifier& classifier, const Matrix& samples,
    const data::PropertyDistribution& fake_property);

// `path` holds the network JSON; the attribute and accuracy go to
// path.replace_extension(".meta.json").
absl::Status SaveClassifier(const PropertyClassifier& classifier,
                            const std::filesystem::path& path);
absl::StatusOr<PropertyClassifier> LoadClassifier(
    const std::filesystem::path& path);

}  // namespace ganprop::classifier

#endif  // GANPROP_CLASSIFIER_CLASSIFIER_H_
