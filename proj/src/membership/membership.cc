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

#include "ganprop/membership/membership.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace ganprop::membership {

absl::Status MiaConfig::Validate() const {
  if (k < 1) return absl::InvalidArgumentError("reconstruction budget k must be >= 1");
  if (!std::isfinite(lambda_p)) return absl::InvalidArgumentError("lambda_p must be finite");
  return absl::OkStatus();
}

double SquaredEuclidean(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

absl::StatusOr<ReconstructionBank> ReconstructionBank::Create(
    const gan::BlindSampler& gan, int k, uint64_t seed) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  absl::StatusOr<Matrix> samples = gan.SampleBlind(k, seed);
  if (!samples.ok()) return samples.status();
  return ReconstructionBank(*std::move(samples));
}

absl::StatusOr<ReconstructionBank> ReconstructionBank::FromSamples(
    Matrix samples) {
  if (samples.rows() < 1) return absl::InvalidArgumentError("empty bank");
  return ReconstructionBank(std::move(samples));
}

absl::StatusOr<Reconstruction> ReconstructionBank::Nearest(
    std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != samples_.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sample has length ", x.size(), ", generator emits ", samples_.cols()));
  }
  const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), x.size());
  Reconstruction best;
  best.distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
    const double d = (samples_.row(i) - q).squaredNorm();
    if (d < best.distance) {
      best.distance = d;
      best.index = static_cast<int>(i);
    }
  }
  best.nearest = samples_.row(best.index);
  return best;
}

absl::StatusOr<Reconstruction> Reconstruct(const gan::BlindSampler& gan,
                                           std::span<const double> x, int k,
                                           uint64_t seed) {
  absl::StatusOr<ReconstructionBank> bank = ReconstructionBank::Create(gan, k, seed);
  if (!bank.ok()) return bank.status();
  return bank->Nearest(x);
}

absl::StatusOr<MiaScore> CalibratedError(std::span<const double> x,
                                         const gan::BlindSampler& target,
                                         const gan::BlindSampler& reference,
                                         int k, uint64_t seed) {
  if (target.sample_width() != reference.sample_width()) {
    return absl::InvalidArgumentError("target and reference widths differ");
  }
  absl::StatusOr<Reconstruction> raw = Reconstruct(target, x, k, seed);
  if (!raw.ok()) return raw.status();
  absl::StatusOr<Reconstruction> ref = Reconstruct(reference, x, k, seed);
  if (!ref.ok()) return ref.status();
  MiaScore score;
  score.raw = raw->distance;
  score.reference = ref->distance;
  score.calibrated = score.raw - score.reference;
  return score;
}

absl::StatusOr<std::vector<MiaScore>> ScoreSamples(
    const Matrix& samples, const gan::BlindSampler& target,
    const gan::BlindSampler& reference, int k, uint64_t seed) {
  if (target.sample_width() != reference.sample_width()) {
    return absl::InvalidArgumentError("target and reference widths differ");
  }
  absl::StatusOr<ReconstructionBank> target_bank =
      ReconstructionBank::Create(target, k, seed);
  if (!target_bank.ok()) return target_bank.status();
  absl::StatusOr<ReconstructionBank> reference_bank =
      ReconstructionBank::Create(reference, k, seed);
  if (!reference_bank.ok()) return reference_bank.status();
  std::vector<MiaScore> scores(samples.rows());
  std::vector<double> row(samples.cols());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) row[c] = samples(i, c);
    absl::StatusOr<Reconstruction> raw = target_bank->Nearest(row);
    if (!raw.ok()) return raw.status();
    absl::StatusOr<Reconstruction> ref = reference_bank->Nearest(row);
    if (!ref.ok()) return ref.status();
    scores[i].id = i;
    scores[i].raw = raw->distance;
    scores[i].reference = ref->distance;
    scores[i].calibrated = raw->distance - ref->distance;
  }
  return scores;
}

absl::StatusOr<double> EnhancementTerm(
    std::span<const int> attribute_classes,
    std::span<const PropertyDistribution> properties, double lambda_p) {
  if (properties.empty()) {
    return absl::InvalidArgumentError("enhancement needs at least one attribute");
  }
  if (attribute_classes.size() != properties.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sample carries ", attribute_classes.size(), " attribute classes but ",
        properties.size(), " inferred proportions were supplied"));
  }
  double sum = 0.0;
  for (size_t i = 0; i < properties.size(); ++i) {
    const int c = attribute_classes[i];
    if (c < 0 || c >= properties[i].size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "no inferred proportion for class ", c, " of attribute ", i));
    }
    sum += 2.0 * properties[i][c] - 1.0;
  }
  return lambda_p * sum / static_cast<double>(properties.size());
}

absl::StatusOr<double> DecisionStatistic(
    const MiaScore& score, std::span<const PropertyDistribution> properties,
    const MiaConfig& config, bool enhanced) {
  double threshold = config.epsilon.value_or(0.0);
  if (enhanced) {
    absl::StatusOr<double> term =
        EnhancementTerm(score.attribute_classes, properties, config.lambda_p);
    if (!term.ok()) return term.status();
    threshold += *term;
  }
  return threshold - score.calibrated;
}

absl::StatusOr<bool> Decide(const MiaScore& score,
                            std::span<const PropertyDistribution> properties,
                            const MiaConfig& config, bool enhanced) {
  if (!config.epsilon) return absl::InvalidArgumentError("epsilon is not set");
  absl::StatusOr<double> margin =
      DecisionStatistic(score, properties, config, enhanced);
  if (!margin.ok()) return margin.status();
  return *margin > 0.0;
}

absl::StatusOr<double> Auc(std::span<const double> statistics,
                           std::span<const bool> members) {
  if (statistics.size() != members.size()) {
    return absl::InvalidArgumentError("statistics and labels differ in length");
  }
  const size_t n = statistics.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return statistics[a] < statistics[b];
  });
  // Midranks over tie groups; the Mann-Whitney sum of member ranks gives the
  // pair-count with ties counted half.
  double member_rank_sum = 0.0;
  size_t n_members = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && statistics[order[j]] == statistics[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t) {
      if (members[order[t]]) {
        member_rank_sum += midrank;
        ++n_members;
      }
    }
    i = j;
  }
  const size_t n_non = n - n_members;
  if (n_members == 0 || n_non == 0) {
    return absl::InvalidArgumentError("AUC needs both members and non-members");
  }
  const double m = static_cast<double>(n_members);
  return (member_rank_sum - m * (m + 1) / 2.0) / (m * static_cast<double>(n_non));
}

absl::StatusOr<std::vector<RocPoint>> RocCurve(std::span<const double> statistics,
                                               std::span<const bool> members) {
  if (statistics.size() != members.size()) {
    return absl::InvalidArgumentError("statistics and labels differ in length");
  }
  const size_t n = statistics.size();
  const auto n_members = static_cast<size_t>(
      std::count(members.begin(), members.end(), true));
  if (n_members == 0 || n_members == n) {
    return absl::InvalidArgumentError("ROC needs both members and non-members");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return statistics[a] > statistics[b];
  });
  std::vector<RocPoint> out = {{0.0, 0.0}};
  size_t tp = 0, fp = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    for (; j < n && statistics[order[j]] == statistics[order[i]]; ++j) {
      members[order[j]] ? ++tp : ++fp;
    }
    out.push_back({static_cast<double>(fp) / static_cast<double>(n - n_members),
                   static_cast<double>(tp) / static_cast<double>(n_members)});
    i = j;
  }
  return out;
}

absl::StatusOr<double> EvaluateAuc(
    std::span<const MiaScore> scores,
    std::span<const PropertyDistribution> properties, const MiaConfig& config,
    bool enhanced) {
  std::vector<double> stats;
  stats.reserve(scores.size());
  // std::vector<bool> has no contiguous storage to view as a span.
  auto members = std::make_unique<bool[]>(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    absl::StatusOr<double> stat =
        DecisionStatistic(scores[i], properties, config, enhanced);
    if (!stat.ok()) return stat.status();
    stats.push_back(*stat);
    members[i] = scores[i].member;
  }
  return Auc(stats, std::span<const bool>(members.get(), scores.size()));
}

absl::StatusOr<std::vector<SweepPoint>> SensitivitySweep(
    std::span<const MiaScore> scores, double proportion,
    std::span<const double> deviations, const MiaConfig& config) {
  std::vector<SweepPoint> out;
  for (double d : deviations) {
    if (!(d >= -1.0 && d <= 1.0)) {
      return absl::InvalidArgumentError("deviations must lie in [-1, 1]");
    }
    const double p = std::clamp(proportion + d, 0.0, 1.0);
    absl::StatusOr<PropertyDistribution> prop = PropertyDistribution::Binary(p);
    if (!prop.ok()) return prop.status();
    const std::vector<PropertyDistribution> props = {*prop};
    absl::StatusOr<double> auc = EvaluateAuc(scores, props, config, true);
    if (!auc.ok()) return auc.status();
    out.push_back({d, p, *auc});
  }
  return out;
}

std::string ScoresCsv(std::span<const MiaScore> scores,
                      std::span<const double> margins) {
  std::ostringstream out;
  out.precision(17);
  out << "id,raw,reference,calibrated,margin,member\n";
  for (size_t i = 0; i < scores.size(); ++i) {
    const MiaScore& s = scores[i];
    out << s.id << ',' << s.raw << ',' << s.reference << ',' << s.calibrated
        << ',' << (i < margins.size() ? margins[i] : 0.0) << ','
        << (s.member ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string SweepCsv(std::span<const SweepPoint> points) {
  std::ostringstream out;
  out.precision(17);
  out << "deviation,proportion,auc\n";
  for (const SweepPoint& p : points) {
    out << p.deviation << ',' << p.proportion << ',' << p.auc << '\n';
  }
  return out.str();
}

std::string RocCsv(std::span<const RocPoint> points) {
  std::ostringstream out;
  out.precision(17);
  out << "fpr,tpr\n";
  for (const RocPoint& p : points) out << p.fpr << ',' << p.tpr << '\n';
  return out.str();
}

}  // namespace ganprop::membership
