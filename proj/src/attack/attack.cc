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

#include "ganprop/attack/attack.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "absl/strings/str_cat.h"
#include "ganprop/common/random.h"

namespace ganprop::attack {
namespace {

using classifier::PropertyClassifier;
using nn::Tape;
using nn::Var;

void FillNormStats(LatentCodeSet& set) {
  set.mean_norm = 0.0;
  set.max_norm = 0.0;
  for (Eigen::Index i = 0; i < set.codes.rows(); ++i) {
    const double norm = set.codes.row(i).norm();
    set.mean_norm += norm;
    set.max_norm = std::max(set.max_norm, norm);
  }
  if (set.codes.rows() > 0) set.mean_norm /= set.codes.rows();
}

// Loss and d(loss)/d(codes) summed over members.
absl::StatusOr<std::pair<double, Matrix>> LossAndGradient(
    const ShadowEnsemble& ensemble, const PropertyClassifier& clf,
    const Matrix& codes) {
  double total = 0.0;
  Matrix grad = Matrix::Zero(codes.rows(), codes.cols());
  for (const ShadowMember& member : ensemble.members) {
    Tape tape;
    const Var z = tape.Variable(codes);
    const Var phi = SoftPhi(tape, clf, member.generator.Apply(tape, z));
    Matrix target(1, member.property.size());
    for (int c = 0; c < member.property.size(); ++c) {
      target(0, c) = member.property[c];
    }
    const Var loss = nn::SumAll(nn::Square(nn::Sub(phi, tape.Constant(target))));
    absl::StatusOr<std::vector<Var>> g =
        tape.Grad(loss, std::vector<Var>{z}, /*create_graph=*/false);
    if (!g.ok()) return g.status();
    total += loss.scalar();
    grad += (*g)[0].value();
  }
  return std::make_pair(total, std::move(grad));
}

absl::Status CheckClassifierFits(const ShadowEnsemble& ensemble,
                                 const PropertyClassifier& clf) {
  if (absl::Status s = ensemble.Validate(); !s.ok()) return s;
  if (ensemble.members.front().generator.sample_width() != clf.input_width()) {
    return absl::InvalidArgumentError(
        "classifier input width != shadow generator sample width");
  }
  for (const ShadowMember& m : ensemble.members) {
    if (m.property.size() != clf.n_classes()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "shadow ", m.id, " property has ", m.property.size(),
          " classes, classifier has ", clf.n_classes()));
    }
  }
  return absl::OkStatus();
}

}  // namespace

std::string PhiModeName(PhiMode mode) {
  return mode == PhiMode::kHard ? "hard" : "soft";
}

absl::StatusOr<PhiMode> ParsePhiMode(std::string_view name) {
  if (name == "hard") return PhiMode::kHard;
  if (name == "soft") return PhiMode::kSoft;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown phi mode '", std::string(name), "'"));
}

absl::StatusOr<PropertyDistribution> Phi(const Matrix& label_probs,
                                         PhiMode mode) {
  if (label_probs.rows() == 0 || label_probs.cols() == 0) {
    return absl::InvalidArgumentError("phi needs at least one probability row");
  }
  if (mode == PhiMode::kHard) {
    std::vector<int> counts(label_probs.cols(), 0);
    std::vector<double> row(label_probs.cols());
    for (Eigen::Index i = 0; i < label_probs.rows(); ++i) {
      for (Eigen::Index c = 0; c < label_probs.cols(); ++c) {
        row[c] = label_probs(i, c);
      }
      ++counts[classifier::ArgmaxLastTie(row)];
    }
    return PropertyDistribution::FromCounts(counts);
  }
  std::vector<double> mean(label_probs.cols());
  for (Eigen::Index c = 0; c < label_probs.cols(); ++c) {
    mean[c] = label_probs.col(c).mean();
  }
  return PropertyDistribution::Create(std::move(mean));
}

Var SoftPhi(Tape& tape, const PropertyClassifier& clf, Var samples) {
  const nn::DenseNetwork& net = clf.network();
  const Var out = net.Apply(net.Bind(tape, /*trainable=*/false), samples);
  const double inv_n = 1.0 / out.rows();
  const Var mean = nn::Scale(nn::ColSum(out), inv_n);
  if (!clf.sigmoid_head()) return mean;
  // [1 - p, p] from the single sigmoid column.
  Matrix to_two(1, 2);
  to_two << -1.0, 1.0;
  Matrix offset(1, 2);
  offset << 1.0, 0.0;
  return nn::Add(nn::MatMul(mean, tape.Constant(to_two)), tape.Constant(offset));
}

absl::StatusOr<double> AbsDiff(const PropertyDistribution& inferred,
                               const PropertyDistribution& real) {
  if (inferred.size() != real.size()) {
    return absl::InvalidArgumentError("distributions differ in length");
  }
  if (inferred.is_binary()) {
    return std::abs(inferred.proportion() - real.proportion());
  }
  double l1 = 0.0;
  for (int c = 0; c < inferred.size(); ++c) l1 += std::abs(inferred[c] - real[c]);
  return 0.5 * l1;
}

absl::StatusOr<double> CosineSimilarity(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError("vectors differ in length");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    return absl::InvalidArgumentError("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

LatentCodeSet RandomCodes(const gan::LatentPrior& prior, int n, uint64_t seed) {
  LatentCodeSet set;
  set.codes = prior.Sample(n, seed);
  set.origin = CodeOrigin::kRandom;
  FillNormStats(set);
  return set;
}

absl::Status ShadowEnsemble::Validate() const {
  if (members.empty()) return absl::InvalidArgumentError("shadow ensemble is empty");
  const int dim = members.front().generator.latent_dim();
  const int width = members.front().generator.sample_width();
  for (const ShadowMember& m : members) {
    if (m.generator.latent_dim() != dim || m.generator.sample_width() != width) {
      return absl::InvalidArgumentError(absl::StrCat(
          "shadow ", m.id, " does not share latent dim ", dim,
          " and sample width ", width));
    }
  }
  return absl::OkStatus();
}

std::vector<PropertyDistribution> ShadowGridProperties(
    std::span<const PropertyDistribution> grid, int members) {
  std::vector<PropertyDistribution> out;
  if (grid.empty()) return out;
  for (int k = 0; k < members; ++k) out.push_back(grid[k % grid.size()]);
  return out;
}

absl::Status CheckGridBalance(const ShadowEnsemble& ensemble,
                              std::span<const PropertyDistribution> grid) {
  if (grid.empty()) return absl::InvalidArgumentError("empty property grid");
  std::vector<int> per_point(grid.size(), 0);
  for (const ShadowMember& m : ensemble.members) {
    auto it = std::find(grid.begin(), grid.end(), m.property);
    if (it == grid.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("shadow ", m.id, " property is not a grid point"));
    }
    ++per_point[it - grid.begin()];
  }
  const auto [lo, hi] = std::minmax_element(per_point.begin(), per_point.end());
  if (*hi - *lo > 1) {
    return absl::FailedPreconditionError(absl::StrCat(
        "shadow properties are unbalanced over the grid: ", *lo, " to ", *hi,
        " members per point"));
  }
  return absl::OkStatus();
}

std::string AttackModeName(AttackMode mode) {
  return mode == AttackMode::kFullBlackBox ? "full_bb" : "partial_bb";
}

absl::Status AttackReport::SetGroundTruth(const PropertyDistribution& truth) {
  absl::StatusOr<double> diff = AbsDiff(inferred, truth);
  if (!diff.ok()) return diff.status();
  absl::StatusOr<double> cos = CosineSimilarity(inferred.probs(), truth.probs());
  if (!cos.ok()) return cos.status();
  real = truth;
  abs_diff = *diff;
  cosine = *cos;
  return absl::OkStatus();
}

nlohmann::json AttackReport::ToJson() const {
  nlohmann::json j = {{"mode", AttackModeName(mode)},
                      {"phi", PhiModeName(phi)},
                      {"inferred", inferred.probs()},
                      {"query_count", query_count},
                      {"seed", seed},
                      {"target_id", target_id},
                      {"classifier_id", classifier_id}};
  if (real) j["real"] = real->probs();
  if (abs_diff) j["abs_diff"] = *abs_diff;
  if (cosine) j["cosine_similarity"] = *cosine;
  return j;
}

absl::StatusOr<AttackReport> AttackFullBb(const gan::BlindSampler& target,
                                          const PropertyClassifier& clf,
                                          int n_samples, uint64_t seed,
                                          PhiMode phi) {
  if (n_samples < 1) return absl::InvalidArgumentError("n_samples must be >= 1");
  absl::StatusOr<Matrix> samples = target.SampleBlind(n_samples, seed);
  if (!samples.ok()) return samples.status();
  absl::StatusOr<Matrix> probs = clf.PredictProba(*samples);
  if (!probs.ok()) return probs.status();
  absl::StatusOr<PropertyDistribution> inferred = Phi(*probs, phi);
  if (!inferred.ok()) return inferred.status();
  AttackReport report;
  report.inferred = *std::move(inferred);
  report.query_count = n_samples;
  report.mode = AttackMode::kFullBlackBox;
  report.phi = phi;
  report.seed = seed;
  return report;
}

absl::StatusOr<AttackReport> AttackPartialBb(const gan::CodeGenerator& target,
                                             const PropertyClassifier& clf,
                                             const LatentCodeSet& codes,
                                             PhiMode phi) {
  if (codes.size() == 0) return absl::InvalidArgumentError("empty code set");
  absl::StatusOr<Matrix> samples = target.GenerateFrom(codes.codes);
  if (!samples.ok()) return samples.status();
  absl::StatusOr<Matrix> probs = clf.PredictProba(*samples);
  if (!probs.ok()) return probs.status();
  absl::StatusOr<PropertyDistribution> inferred = Phi(*probs, phi);
  if (!inferred.ok()) return inferred.status();
  AttackReport report;
  report.inferred = *std::move(inferred);
  report.query_count = codes.size();
  report.mode = AttackMode::kPartialBlackBox;
  report.phi = phi;
  return report;
}

absl::StatusOr<double> EnsembleLoss(const ShadowEnsemble& ensemble,
                                    const PropertyClassifier& clf,
                                    const Matrix& codes) {
  if (absl::Status s = CheckClassifierFits(ensemble, clf); !s.ok()) return s;
  double total = 0.0;
  for (const ShadowMember& member : ensemble.members) {
    absl::StatusOr<Matrix> samples = member.generator.GenerateFrom(codes);
    if (!samples.ok()) return samples.status();
    absl::StatusOr<Matrix> probs = clf.PredictProba(*samples);
    if (!probs.ok()) return probs.status();
    for (Eigen::Index c = 0; c < probs->cols(); ++c) {
      const double d = probs->col(c).mean() - member.property[c];
      total += d * d;
    }
  }
  return total;
}

absl::StatusOr<LatentCodeSet> OptimizeLatentSet(
    const ShadowEnsemble& ensemble, const PropertyClassifier& clf,
    const LatentOptimizationOptions& options,
    std::optional<LatentCodeSet> init) {
  if (absl::Status s = CheckClassifierFits(ensemble, clf); !s.ok()) return s;
  if (absl::Status s = options.optimizer.Validate(); !s.ok()) return s;
  if (options.iters < 0 || options.patience < 1) {
    return absl::InvalidArgumentError("iters must be >= 0 and patience >= 1");
  }
  const gan::Generator& first = ensemble.members.front().generator;
  LatentCodeSet start;
  if (init) {
    start = *std::move(init);
  } else {
    if (options.set_size < 1) {
      return absl::InvalidArgumentError("set_size must be >= 1");
    }
    start = RandomCodes(first.prior(), options.set_size,
                        DeriveSeed(options.seed, "latent_init"));
  }
  if (start.size() == 0 || start.dim() != first.latent_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "initial codes must be nonempty with length ", first.latent_dim()));
  }

  LatentCodeSet out;
  out.origin = CodeOrigin::kOptimized;
  Matrix codes = start.codes;
  Matrix best_codes = codes;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_so_far;
  nn::Optimizer opt(options.optimizer);

  for (int it = 0; it <= options.iters; ++it) {
    absl::StatusOr<std::pair<double, Matrix>> lg =
        LossAndGradient(ensemble, clf, codes);
    if (!lg.ok()) return lg.status();
    const double loss = lg->first;
    if (!std::isfinite(loss) || !lg->second.allFinite()) {
      out.failed = true;
      out.failure = absl::StrCat("non-finite latent loss at iteration ", it);
      break;
    }
    out.trace.push_back(loss);
    if (loss < best) {
      best = loss;
      best_codes = codes;
    }
    best_so_far.push_back(best);
    if (it == options.iters) break;
    if (it >= options.patience &&
        best_so_far[it - options.patience] - best < options.min_improvement) {
      break;
    }
    std::vector<Matrix> params = {codes};
    const std::vector<Matrix> grads = {std::move(lg->second)};
    if (absl::Status s = opt.Step(params, grads); !s.ok()) {
      out.failed = true;
      out.failure = absl::StrCat("iteration ", it, ": ", s.message());
      break;
    }
    codes = std::move(params[0]);
  }
  if (out.trace.empty()) {
    // The initial point itself was non-finite; nothing better to offer.
    out.codes = start.codes;
    out.initial_loss = out.final_loss = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.codes = best_codes;
    out.initial_loss = out.trace.front();
    out.final_loss = best;
  }
  FillNormStats(out);
  return out;
}

double WinRatio(std::span<const double> optimized_errors,
                std::span<const double> random_errors) {
  const size_t n = std::min(optimized_errors.size(), random_errors.size());
  if (n == 0) return 0.0;
  int wins = 0;
  for (size_t i = 0; i < n; ++i) wins += optimized_errors[i] < random_errors[i];
  return static_cast<double>(wins) / n;
}

absl::StatusOr<ModeComparisonResult> CompareModes(
    std::span<const AttackTarget> targets, const PropertyClassifier& clf,
    const ShadowEnsemble& ensemble, std::span<const int> sample_counts,
    int trials, const LatentOptimizationOptions& options, uint64_t seed) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (targets.empty()) return absl::InvalidArgumentError("no targets");
  ModeComparisonResult result;
  for (int count : sample_counts) {
    LatentOptimizationOptions opt = options;
    opt.set_size = count;
    opt.seed = DeriveSeed(seed, "compare_codes", count);
    absl::StatusOr<LatentCodeSet> codes = OptimizeLatentSet(ensemble, clf, opt);
    if (!codes.ok()) return codes.status();
    std::vector<double> optimized_errors, random_errors;
    for (size_t t = 0; t < targets.size(); ++t) {
      const AttackTarget& target = targets[t];
      absl::StatusOr<AttackReport> partial =
          AttackPartialBb(*target.generator, clf, *codes);
      if (!partial.ok()) return partial.status();
      if (absl::Status s = partial->SetGroundTruth(target.real); !s.ok()) return s;
      result.records.push_back({target.id, AttackMode::kPartialBlackBox, count, 0,
                                target.real.probs().back(),
                                partial->inferred.probs().back(),
                                *partial->abs_diff});
      for (int trial = 0; trial < trials; ++trial) {
        absl::StatusOr<AttackReport> full = AttackFullBb(
            *target.generator, clf, count,
            DeriveSeed(seed, absl::StrCat("compare_full_", target.id, "_", count),
                       trial));
        if (!full.ok()) return full.status();
        if (absl::Status s = full->SetGroundTruth(target.real); !s.ok()) return s;
        result.records.push_back({target.id, AttackMode::kFullBlackBox, count,
                                  trial, target.real.probs().back(),
                                  full->inferred.probs().back(), *full->abs_diff});
        optimized_errors.push_back(*partial->abs_diff);
        random_errors.push_back(*full->abs_diff);
      }
    }
    ModeComparison row;
    row.sample_count = count;
    row.comparisons = static_cast<int>(random_errors.size());
    row.ratio = WinRatio(optimized_errors, random_errors);
    row.wins = static_cast<int>(std::lround(row.ratio * row.comparisons));
    result.summary.push_back(row);
  }
  return result;
}

}  // namespace ganprop::attack
