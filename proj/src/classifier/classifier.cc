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

#include "ganprop/classifier/classifier.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ganprop/common/random.h"
#include "ganprop/nn/serialization.h"
#include "ganprop/nn/tape.h"

namespace ganprop::classifier {
namespace {

using nlohmann::json;
using nn::Tape;
using nn::Var;

std::filesystem::path MetaPath(std::filesystem::path path) {
  return path.replace_extension(".meta.json");
}

}  // namespace

absl::StatusOr<PropertyClassifier> PropertyClassifier::Create(
    nn::DenseNetwork network, data::AttributeSpec attribute,
    double test_accuracy) {
  if (absl::Status s = attribute.Validate(); !s.ok()) return s;
  const nn::ActivationKind head = network.spec().activations.back().kind;
  bool sigmoid = false;
  if (head == nn::ActivationKind::kSoftmax &&
      network.output_width() == attribute.n_classes) {
    sigmoid = false;
  } else if (head == nn::ActivationKind::kSigmoid &&
             network.output_width() == 1 && attribute.n_classes == 2) {
    sigmoid = true;
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "classifier head must be a ", attribute.n_classes,
        "-wide softmax or, for binary attributes, a 1-wide sigmoid; got ",
        network.output_width(), "-wide ", nn::ActivationName(head)));
  }
  if (!(test_accuracy >= 0.0 && test_accuracy <= 1.0)) {
    return absl::InvalidArgumentError("test accuracy must lie in [0,1]");
  }
  return PropertyClassifier(std::move(network), std::move(attribute),
                            test_accuracy, sigmoid);
}

absl::StatusOr<Matrix> PropertyClassifier::PredictProba(
    const Matrix& samples) const {
  if (samples.cols() != input_width()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "samples have width ", samples.cols(), ", classifier expects ",
        input_width()));
  }
  absl::StatusOr<Matrix> out = network_.ForwardBatch(samples);
  if (!out.ok() || !sigmoid_head_) return out;
  Matrix probs(samples.rows(), 2);
  probs.col(0) = (1.0 - out->col(0).array()).matrix();
  probs.col(1) = out->col(0);
  return probs;
}

int ArgmaxLastTie(std::span<const double> probs) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
    if (probs[c] >= probs[best]) best = c;
  }
  return best;
}

absl::StatusOr<std::vector<int>> PropertyClassifier::PredictHard(
    const Matrix& samples) const {
  absl::StatusOr<Matrix> probs = PredictProba(samples);
  if (!probs.ok()) return probs.status();
  std::vector<int> labels(probs->rows());
  std::vector<double> row(probs->cols());
  for (Eigen::Index i = 0; i < probs->rows(); ++i) {
    for (Eigen::Index c = 0; c < probs->cols(); ++c) row[c] = (*probs)(i, c);
    labels[i] = ArgmaxLastTie(row);
  }
  return labels;
}

absl::StatusOr<double> PropertyClassifier::Accuracy(
    const data::LabeledDataset& dataset) const {
  if (dataset.size() == 0) return absl::InvalidArgumentError("empty dataset");
  absl::StatusOr<std::vector<int>> pred = PredictHard(dataset.samples);
  if (!pred.ok()) return pred.status();
  int correct = 0;
  for (int i = 0; i < dataset.size(); ++i) correct += (*pred)[i] == dataset.labels[i];
  return static_cast<double>(correct) / dataset.size();
}

nn::DenseNetworkSpec DefaultClassifierSpec(int input_width, int n_classes,
                                           std::vector<int> hidden,
                                           uint64_t seed) {
  return nn::DenseNetworkSpec::Mlp(input_width, hidden, n_classes,
                                   nn::Activation::LeakyRelu(0.2),
                                   nn::Activation::Softmax(), seed);
}

absl::StatusOr<ClassifierTrainingResult> TrainClassifier(
    const data::LabeledDataset& train, const data::LabeledDataset& test,
    const nn::DenseNetworkSpec& spec, const TrainingOptions& options) {
  if (train.size() == 0 || test.size() == 0) {
    return absl::InvalidArgumentError("classifier train and test sets must be nonempty");
  }
  if (!(train.attribute == test.attribute)) {
    return absl::InvalidArgumentError("train and test attributes differ");
  }
  if (options.epochs < 0) return absl::InvalidArgumentError("epochs must be >= 0");
  if (absl::Status s = options.optimizer.Validate(); !s.ok()) return s;
  absl::StatusOr<nn::DenseNetwork> net = nn::DenseNetwork::Create(spec);
  if (!net.ok()) return net.status();
  nn::DenseLayer& last = net->mutable_layers().back();
  last.weight.setZero();
  last.bias.setZero();
  absl::StatusOr<PropertyClassifier> probe =
      PropertyClassifier::Create(*net, train.attribute);
  if (!probe.ok()) return probe.status();
  if (train.width() != spec.input_width() || test.width() != spec.input_width()) {
    return absl::InvalidArgumentError("sample width != classifier input width");
  }
  const bool sigmoid = probe->sigmoid_head();
  const int n_classes = train.attribute.n_classes;

  ClassifierTrainingResult result{*std::move(probe), {}, false, {}};
  nn::Optimizer opt(options.optimizer);
  Rng rng(DeriveSeed(options.seed, "classifier_batches"));
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const int m = std::min(options.optimizer.batch_size, train.size());

  for (int epoch = 0; epoch < options.epochs && !result.failed; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (int start = 0; start < train.size(); start += m) {
      const int end = std::min(start + m, train.size());
      Matrix x(end - start, train.width());
      Matrix target = Matrix::Zero(end - start, sigmoid ? 1 : n_classes);
      for (int i = start; i < end; ++i) {
        x.row(i - start) = train.samples.row(order[i]);
        if (sigmoid) {
          target(i - start, 0) = train.labels[order[i]];
        } else {
          target(i - start, train.labels[order[i]]) = 1.0;
        }
      }
      Tape tape;
      const nn::BoundParameters params = net->Bind(tape, true);
      const Var logits = net->Apply(params, tape.Constant(x), false);
      const Var y = tape.Constant(target);
      Var loss;
      if (sigmoid) {
        // softplus(a) - y a is the binary cross-entropy on logit a.
        loss = nn::Mean(nn::Sub(nn::Softplus(logits), nn::Mul(y, logits)));
      } else {
        loss = nn::Scale(nn::SumAll(nn::Mul(y, nn::LogSoftmax(logits))),
                         -1.0 / (end - start));
      }
      if (!std::isfinite(loss.scalar())) {
        result.failed = true;
        result.failure = absl::StrCat("non-finite classifier loss in epoch ", epoch);
        break;
      }
      absl::StatusOr<std::vector<Var>> grads =
          tape.Grad(loss, params.All(), /*create_graph=*/false);
      if (!grads.ok()) return grads.status();
      std::vector<Matrix> grad_values;
      for (const Var& g : *grads) grad_values.push_back(g.value());
      std::vector<Matrix> values = net->ParameterValues();
      if (absl::Status s = opt.Step(values, grad_values); !s.ok()) {
        result.failed = true;
        result.failure = absl::StrCat("epoch ", epoch, ": ", s.message());
        break;
      }
      if (absl::Status s = net->SetParameterValues(values); !s.ok()) return s;
      total += loss.scalar();
      ++batches;
    }
    if (!result.failed) result.epoch_losses.push_back(total / batches);
  }
  absl::StatusOr<PropertyClassifier> trained =
      PropertyClassifier::Create(*std::move(net), train.attribute);
  if (!trained.ok()) return trained.status();
  absl::StatusOr<double> accuracy = trained->Accuracy(test);
  if (!accuracy.ok()) return accuracy.status();
  trained->set_test_accuracy(*accuracy);
  result.classifier = *std::move(trained);
  return result;
}

absl::Status CheckDisjointProvenance(const data::LabeledDataset& a,
                                     const data::LabeledDataset& b) {
  std::unordered_set<int64_t> seen(a.ids.begin(), a.ids.end());
  for (int64_t id : b.ids) {
    if (seen.count(id)) {
      return absl::FailedPreconditionError(
          absl::StrCat("sample id ", id, " appears in both datasets"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<int>> GateReleaseRows(
    const PropertyClassifier& classifier, const Matrix& samples,
    const data::PropertyDistribution& fake_property) {
  if (fake_property.size() != classifier.n_classes()) {
    return absl::InvalidArgumentError("fake property length != class count");
  }
  absl::StatusOr<std::vector<int>> labels = classifier.PredictHard(samples);
  if (!labels.ok()) return labels.status();
  std::vector<int> available(classifier.n_classes(), 0);
  for (int l : *labels) ++available[l];
  std::vector<std::string> absent;
  for (int c = 0; c < classifier.n_classes(); ++c) {
    if (fake_property[c] > 0.0 && available[c] == 0) {
      absent.push_back(absl::StrCat(c));
    }
  }
  if (!absent.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "fake property needs classes {", absl::StrJoin(absent, ","),
        "} but none of the ", samples.rows(),
        " samples is predicted as such; predicted counts [",
        absl::StrJoin(available, ","), "], achievable size 0"));
  }
  int size = static_cast<int>(samples.rows());
  std::vector<int> counts;
  for (; size > 0; --size) {
    counts = data::LargestRemainderCounts(fake_property, size);
    bool fits = true;
    for (int c = 0; c < classifier.n_classes() && fits; ++c) {
      fits = counts[c] <= available[c];
    }
    if (fits) break;
  }
  if (size == 0) return std::vector<int>{};
  std::vector<int> rows;
  rows.reserve(size);
  for (int i = 0; i < static_cast<int>(labels->size()); ++i) {
    int& quota = counts[(*labels)[i]];
    if (quota > 0) {
      rows.push_back(i);
      --quota;
    }
  }
  return rows;
}

absl::StatusOr<Matrix> GateRelease(
    const PropertyClassifier& classifier, const Matrix& samples,
    const data::PropertyDistribution& fake_property) {
  absl::StatusOr<std::vector<int>> rows =
      GateReleaseRows(classifier, samples, fake_property);
  if (!rows.ok()) return rows.status();
  Matrix out(rows->size(), samples.cols());
  for (size_t i = 0; i < rows->size(); ++i) out.row(i) = samples.row((*rows)[i]);
  return out;
}

absl::Status SaveClassifier(const PropertyClassifier& classifier,
                            const std::filesystem::path& path) {
  if (absl::Status s = nn::SaveNetwork(classifier.network(), path); !s.ok()) {
    return s;
  }
  const json meta = {{"n_classes", classifier.attribute().n_classes},
                     {"class_names", classifier.attribute().class_names},
                     {"test_accuracy", classifier.test_accuracy()}};
  return nn::WriteTextFile(MetaPath(path), meta.dump(1) + "\n");
}

absl::StatusOr<PropertyClassifier> LoadClassifier(
    const std::filesystem::path& path) {
  absl::StatusOr<nn::DenseNetwork> net = nn::LoadNetwork(path);
  if (!net.ok()) return net.status();
  absl::StatusOr<json> meta = nn::ReadJsonFile(MetaPath(path));
  if (!meta.ok()) return meta.status();
  data::AttributeSpec attribute;
  double accuracy = 0.0;
  try {
    attribute.n_classes = meta->at("n_classes").get<int>();
    attribute.class_names =
        meta->at("class_names").get<std::vector<std::string>>();
    accuracy = meta->at("test_accuracy").get<double>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed classifier metadata: ", e.what()));
  }
  return PropertyClassifier::Create(*std::move(net), std::move(attribute),
                                    accuracy);
}

}  // namespace ganprop::classifier
