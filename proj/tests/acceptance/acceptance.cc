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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
//
// Usage: acceptance [--configs DIR] [--runs DIR] [--only N[,N...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ganprop/attack/attack.h"
#include "ganprop/classifier/classifier.h"
#include "ganprop/common/status_macros.h"
#include "ganprop/data/dataset.h"
#include "ganprop/gan/generator.h"
#include "ganprop/harness/config.h"
#include "ganprop/harness/pipeline.h"
#include "ganprop/harness/results.h"
#include "ganprop/membership/membership.h"
#include "ganprop/nn/network.h"
#include "ganprop/nn/serialization.h"
#include "ganprop/nn/tape.h"
#include "../support/gradcheck.h"

namespace ganprop {
namespace {

namespace fs = std::filesystem;
using attack::PhiMode;
using classifier::PropertyClassifier;
using data::PropertyDistribution;
using harness::ExperimentConfig;
using harness::FigureResult;
using harness::ResultRow;
using nn::Matrix;

// Pinned tolerances.
constexpr int kGradCompositions = 50;
constexpr double kGradRelativeError = 1e-4;
constexpr int kPhiBatches = 1000;
constexpr int kPipelineProperties = 20;
constexpr double kMinClassifierAccuracy = 0.98;
constexpr int kFullSamples = 20000;
constexpr double kMaxMeanAbsDiff = 0.05;
constexpr int kMinTrials = 10;
constexpr int kSmallCount = 64;
constexpr int kLargeCount = 4096;
constexpr double kIdentityLoss = 1e-4;
constexpr int kCompareCount = 100;
constexpr int kEnsembleMembers = 20;
constexpr int kMinCompareTargets = 3;
constexpr int kCompareTrials = 20;
constexpr double kMinWinRatio = 0.5;
constexpr int kStarts = 5;
constexpr double kMaxStartSpan = 0.05;
constexpr double kMinCosine = 0.95;
constexpr double kAucOracleTolerance = 1e-12;
constexpr int kMiaMembers = 256;
constexpr int kMiaNonMembers = 768;
constexpr double kMiaProperty = 0.3;
constexpr double kMinAucGain = 0.02;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(const absl::Status& s) { return {false, std::string(s.message())}; }

std::string F(double v) { return absl::StrCat(v); }

// ---------------------------------------------------------------------------
// 1. Gradients against central differences.

enum class LossKind { kMse, kCrossEntropy, kSoftplus, kGradientPenalty };

const char* LossName(LossKind k) {
  switch (k) {
    case LossKind::kMse:
      return "mse";
    case LossKind::kCrossEntropy:
      return "cross_entropy";
    case LossKind::kSoftplus:
      return "softplus";
    case LossKind::kGradientPenalty:
      return "gradient_penalty";
  }
  return "";
}

struct Composition {
  nn::DenseNetwork network;
  LossKind loss;
  Matrix input;
  Matrix target;
};

// Builds the loss on `tape`; `input` must already be a tape node.
absl::StatusOr<nn::Var> LossOf(nn::Tape& tape, const nn::DenseNetwork& net,
                               const nn::BoundParameters& params, nn::Var input,
                               LossKind kind, const Matrix& target) {
  const nn::Var out = net.Apply(params, input);
  const double n = static_cast<double>(out.rows());
  switch (kind) {
    case LossKind::kMse:
      return nn::Mean(nn::Square(out - tape.Constant(target)));
    case LossKind::kCrossEntropy:
      return nn::Scale(
          nn::SumAll(nn::Mul(nn::LogSoftmax(out), tape.Constant(target))), -1.0 / n);
    case LossKind::kSoftplus:
      return nn::Mean(nn::Softplus(-out));
    case LossKind::kGradientPenalty: {
      GANPROP_ASSIGN_OR_RETURN(std::vector<nn::Var> g,
                               tape.Grad(nn::SumAll(out), {&input, 1}, true));
      const nn::Var norms = nn::Sqrt(nn::RowSum(nn::Square(g[0])));
      return nn::Add(nn::Mean(nn::Square(nn::AddScalar(norms, -1.0))),
                     nn::Mean(out));
    }
  }
  return absl::InternalError("unknown loss");
}

absl::StatusOr<double> LossValue(const Composition& c, const Matrix& input) {
  nn::Tape tape;
  const nn::BoundParameters params = c.network.Bind(tape, false);
  const nn::Var x = tape.Variable(input);
  GANPROP_ASSIGN_OR_RETURN(nn::Var loss,
                           LossOf(tape, c.network, params, x, c.loss, c.target));
  return loss.scalar();
}

Composition RandomComposition(std::mt19937_64& rng, int index) {
  std::uniform_int_distribution<int> width(2, 5), depth(1, 3), rows(2, 6);
  std::uniform_int_distribution<int> act(0, 2);
  const LossKind kind = static_cast<LossKind>(index % 4);
  nn::DenseNetworkSpec spec;
  spec.layer_widths = {width(rng)};
  const int layers = depth(rng);
  for (int l = 0; l < layers; ++l) {
    spec.layer_widths.push_back(width(rng));
    switch (act(rng)) {
      case 0:
        spec.activations.push_back(nn::Activation::Tanh());
        break;
      case 1:
        spec.activations.push_back(nn::Activation::Sigmoid());
        break;
      default:
        spec.activations.push_back(nn::Activation::Identity());
    }
  }
  if (kind == LossKind::kGradientPenalty || kind == LossKind::kSoftplus) {
    spec.layer_widths.back() = 1;
  }
  spec.seed = rng();
  Composition c{*nn::DenseNetwork::Create(spec), kind, Matrix(), Matrix()};
  const int n = rows(rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  c.input = Matrix::NullaryExpr(n, spec.input_width(), [&] { return normal(rng); });
  const int k = spec.output_width();
  if (kind == LossKind::kCrossEntropy) {
    c.target = Matrix::Zero(n, k);
    std::uniform_int_distribution<int> label(0, k - 1);
    for (int i = 0; i < n; ++i) c.target(i, label(rng)) = 1.0;
  } else {
    c.target = Matrix::NullaryExpr(n, k, [&] { return normal(rng); });
  }
  return c;
}

Outcome Criterion1() {
  std::mt19937_64 rng(20261015);
  double worst = 0.0;
  std::string worst_case;
  for (int i = 0; i < kGradCompositions; ++i) {
    const Composition c = RandomComposition(rng, i);
    nn::Tape tape;
    const nn::BoundParameters params = c.network.Bind(tape, true);
    const nn::Var x = tape.Variable(c.input);
    absl::StatusOr<nn::Var> loss = LossOf(tape, c.network, params, x, c.loss, c.target);
    if (!loss.ok()) return Fail(loss.status());
    if (absl::Status s = tape.Backward(*loss); !s.ok()) return Fail(s);

    std::vector<Matrix> analytic = {tape.grad(x)};
    std::vector<Matrix> numeric = {::ganprop::testing::CentralDifference(
        [&](const Matrix& at) { return *LossValue(c, at); }, c.input)};
    const std::vector<nn::Var> vars = params.All();
    const std::vector<Matrix> values = c.network.ParameterValues();
    for (size_t j = 0; j < vars.size(); ++j) {
      analytic.push_back(tape.grad(vars[j]));
      numeric.push_back(::ganprop::testing::CentralDifference(
          [&](const Matrix& at) {
            Composition probe = c;
            std::vector<Matrix> v = values;
            v[j] = at;
            (void)probe.network.SetParameterValues(v);
            return *LossValue(probe, c.input);
          },
          values[j]));
    }
    for (size_t j = 0; j < analytic.size(); ++j) {
      if (analytic[j].rows() != numeric[j].rows() ||
          analytic[j].cols() != numeric[j].cols()) {
        return {false, absl::StrCat("composition ", i, ": gradient shape mismatch")};
      }
      const double err = ::ganprop::testing::MaxRelativeError(analytic[j], numeric[j]);
      if (err > worst) {
        worst = err;
        worst_case = absl::StrCat(i, " (", LossName(c.loss), ")");
      }
    }
  }
  return {worst < kGradRelativeError,
          absl::StrCat(kGradCompositions, " compositions, max relative error ",
                       F(worst), " at composition ", worst_case, ", limit ",
                       F(kGradRelativeError))};
}

// ---------------------------------------------------------------------------
// 2. Hard aggregation against counting.

Outcome Criterion2() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> rows(1, 60), classes(2, 10), weight(0, 3);
  int ties = 0;
  for (int b = 0; b < kPhiBatches; ++b) {
    const int n = rows(rng), k = classes(rng);
    Matrix probs(n, k);
    std::vector<double> counts(k, 0.0);
    for (int i = 0; i < n; ++i) {
      std::vector<int> w(k);
      int total = 0;
      for (int& v : w) total += v = weight(rng);
      if (total == 0) {
        std::fill(w.begin(), w.end(), 1);
        total = k;
      }
      int best = 0, best_count = 0;
      for (int c = 0; c < k; ++c) {
        probs(i, c) = static_cast<double>(w[c]) / total;
        if (w[c] >= w[best]) best = c;
      }
      for (int c = 0; c < k; ++c) best_count += w[c] == w[best];
      ties += best_count > 1;
      counts[best] += 1.0;
    }
    absl::StatusOr<PropertyDistribution> phi = attack::Phi(probs, PhiMode::kHard);
    if (!phi.ok()) return Fail(phi.status());
    for (int c = 0; c < k; ++c) {
      if ((*phi)[c] != counts[c] / n) {
        return {false, absl::StrCat("batch ", b, " class ", c, ": ", F((*phi)[c]),
                                    " vs count ", F(counts[c] / n))};
      }
    }
  }
  return {true, absl::StrCat(kPhiBatches, " batches equal exactly (", ties,
                             " rows with tied maxima)")};
}

// ---------------------------------------------------------------------------
// 3. Pipeline with a replay generator and a perfect classifier.

class ReplaySampler : public gan::BlindSampler {
 public:
  explicit ReplaySampler(Matrix rows) : rows_(std::move(rows)) {}
  int sample_width() const override { return static_cast<int>(rows_.cols()); }
  absl::StatusOr<Matrix> SampleBlind(int n, uint64_t) const override {
    Matrix out(n, rows_.cols());
    for (int i = 0; i < n; ++i) out.row(i) = rows_.row(i % rows_.rows());
    return out;
  }

 private:
  Matrix rows_;
};

PropertyClassifier SoftmaxClassifier(const Matrix& w) {
  const int k = static_cast<int>(w.cols());
  nn::DenseNetworkSpec spec{{static_cast<int>(w.rows()), k},
                            {nn::Activation::Softmax()}, 0};
  return *PropertyClassifier::Create(
      *nn::DenseNetwork::FromLayers(spec,
                                    {nn::DenseLayer{w, Eigen::RowVectorXd::Zero(k)}}),
      data::AttributeSpec::Numbered(k));
}

Outcome Criterion3() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> classes(2, 10), size(20, 400);
  for (int t = 0; t < kPipelineProperties; ++t) {
    const int k = classes(rng), n = size(rng);
    std::vector<double> weights(k);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (double& w : weights) w = u(rng);
    std::discrete_distribution<int> draw(weights.begin(), weights.end());
    data::LabeledDataset stub;
    stub.attribute = data::AttributeSpec::Numbered(k);
    stub.samples = Matrix::Zero(n, k);
    for (int i = 0; i < n; ++i) {
      stub.labels.push_back(draw(rng));
      stub.ids.push_back(i);
      stub.samples(i, stub.labels.back()) = 1.0;
    }
    const ReplaySampler sampler(stub.samples);
    const PropertyClassifier clf = SoftmaxClassifier(10.0 * Matrix::Identity(k, k));
    absl::StatusOr<attack::AttackReport> report =
        attack::AttackFullBb(sampler, clf, n, rng(), PhiMode::kHard);
    if (!report.ok()) return Fail(report.status());
    if (!(report->inferred == stub.EmpiricalProperty())) {
      return {false, absl::StrCat("property ", t, " (", k, " classes, ", n,
                                  " rows): inferred differs from empirical")};
    }
  }
  return {true, absl::StrCat(kPipelineProperties, " random properties recovered exactly")};
}

// ---------------------------------------------------------------------------
// Shared experiments.

struct Context {
  fs::path configs;
  fs::path runs;
  std::optional<harness::Experiment> mixture;
  std::optional<harness::Experiment> digits;
  // Criterion 9's mean cosine, consumed by criterion 10.
  std::optional<double> multiclass_cosine;
};

absl::StatusOr<ExperimentConfig> LoadPinned(const Context& ctx, const std::string& name) {
  GANPROP_ASSIGN_OR_RETURN(ExperimentConfig c,
                           harness::LoadConfig(ctx.configs / (name + ".conf")));
  c.output_dir = (ctx.runs / name).string();
  c.threads = 1;
  return c;
}

absl::StatusOr<harness::Experiment*> Mixture(Context& ctx) {
  if (!ctx.mixture) {
    GANPROP_ASSIGN_OR_RETURN(ExperimentConfig c, LoadPinned(ctx, "mixture2d"));
    c.full_samples = kFullSamples;
    c.trials = kCompareTrials;
    c.sample_counts = {kSmallCount, kLargeCount};
    c.compare_counts = {kCompareCount};
    c.starts = kStarts;
    c.mia_members = kMiaMembers;
    c.mia_nonmembers = kMiaNonMembers;
    c.mia_property = kMiaProperty;
    GANPROP_ASSIGN_OR_RETURN(harness::Experiment e, harness::Experiment::Create(c));
    ctx.mixture = std::move(e);
  }
  return &*ctx.mixture;
}

absl::StatusOr<harness::Experiment*> Digits(Context& ctx) {
  if (!ctx.digits) {
    GANPROP_ASSIGN_OR_RETURN(ExperimentConfig c, LoadPinned(ctx, "digitlike"));
    c.full_samples = kFullSamples;
    GANPROP_ASSIGN_OR_RETURN(harness::Experiment e, harness::Experiment::Create(c));
    ctx.digits = std::move(e);
  }
  return &*ctx.digits;
}

// Rows of a figure CSV without its header.
std::vector<std::vector<std::string>> CsvRows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  for (const std::string& line : std::vector<std::string>(absl::StrSplit(csv, '\n'))) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(std::vector<std::string>(absl::StrSplit(line, ',')));
  }
  return rows;
}

double ToDouble(const std::string& s) {
  double v = std::nan("");
  if (!absl::SimpleAtod(s, &v)) return std::nan("");
  return v;
}

double MeanOf(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? std::nan("") : sum / v.size();
}

double PopulationVariance(const std::vector<double>& v) {
  const double m = MeanOf(v);
  double sum = 0.0;
  for (double x : v) sum += (x - m) * (x - m);
  return sum / v.size();
}

// ---------------------------------------------------------------------------
// 4. Full black-box accuracy per grid point.

Outcome Criterion4(Context& ctx) {
  absl::StatusOr<harness::Experiment*> e = Mixture(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<const harness::DataPools*> pools = (*e)->Pools();
  if (!pools.ok()) return Fail(pools.status());
  absl::StatusOr<const PropertyClassifier*> clf = (*e)->Classifier();
  if (!clf.ok()) return Fail(clf.status());
  absl::StatusOr<double> accuracy = (*clf)->Accuracy((*pools)->classifier_test);
  if (!accuracy.ok()) return Fail(accuracy.status());

  absl::StatusOr<FigureResult> fig = harness::RunFigure(**e, "f4");
  if (!fig.ok()) return Fail(fig.status());
  std::map<double, std::vector<double>> errors;
  std::set<std::string> targets;
  for (const ResultRow& r : fig->rows) {
    if (r.query_count != kFullSamples) return {false, "unexpected query count"};
    errors[r.p_real[0]].push_back(r.abs_diff);
    targets.insert(r.target_id);
  }
  bool pass = *accuracy >= kMinClassifierAccuracy && errors.size() == 3 &&
              targets.size() == 9;
  std::string detail = absl::StrCat("classifier accuracy ", F(*accuracy), ";");
  for (const auto& [p, v] : errors) {
    const double m = MeanOf(v);
    pass = pass && m <= kMaxMeanAbsDiff;
    absl::StrAppend(&detail, " P=", F(p), " mean|err| ", F(m), ";");
  }
  absl::StrAppend(&detail, " ", targets.size(), " targets, ", kFullSamples,
                  " samples, limit ", F(kMaxMeanAbsDiff));
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 5. Error and variance shrink with more samples.

Outcome Criterion5(Context& ctx) {
  absl::StatusOr<harness::Experiment*> e = Mixture(ctx);
  if (!e.ok()) return Fail(e.status());
  if ((*e)->config().trials < kMinTrials) return {false, "too few trials"};
  absl::StatusOr<FigureResult> fig = harness::RunFigure(**e, "f5");
  if (!fig.ok()) return Fail(fig.status());
  // count -> errors; count -> target -> inferences.
  std::map<int, std::vector<double>> errors;
  std::map<int, std::map<std::string, std::vector<double>>> inferred;
  for (const ResultRow& r : fig->rows) {
    errors[r.query_count].push_back(r.abs_diff);
    inferred[r.query_count][r.target_id].push_back(r.p_infer[0]);
  }
  auto variance = [&](int count) {
    std::vector<double> per_target;
    for (const auto& [id, v] : inferred[count]) per_target.push_back(PopulationVariance(v));
    return MeanOf(per_target);
  };
  const double err_small = MeanOf(errors[kSmallCount]);
  const double err_large = MeanOf(errors[kLargeCount]);
  const double var_small = variance(kSmallCount);
  const double var_large = variance(kLargeCount);
  const bool pass = err_large <= err_small && var_large <= var_small;
  return {pass, absl::StrCat((*e)->config().trials, " trials; mean|err| ",
                             kSmallCount, ": ", F(err_small), ", ", kLargeCount, ": ",
                             F(err_large), "; trial variance ", kSmallCount, ": ",
                             F(var_small), ", ", kLargeCount, ": ", F(var_large))};
}

// ---------------------------------------------------------------------------
// 6. Latent optimization never ends above its start.

gan::Generator IdentityGenerator(int dim) {
  nn::DenseNetworkSpec spec{{dim, dim}, {nn::Activation::Identity()}, 0};
  auto net = nn::DenseNetwork::FromLayers(
      spec, {nn::DenseLayer{Matrix::Identity(dim, dim), Eigen::RowVectorXd::Zero(dim)}});
  return *gan::Generator::Create(*net, {gan::PriorKind::kGaussianStandard, dim});
}

Outcome Criterion6(Context& ctx) {
  int runs = 0;
  std::string detail;
  bool pass = true;
  auto check = [&](const attack::LatentCodeSet& codes, const std::string& what) {
    ++runs;
    if (!(codes.final_loss <= codes.initial_loss)) {
      pass = false;
      absl::StrAppend(&detail, what, " final ", F(codes.final_loss), " > initial ",
                      F(codes.initial_loss), "; ");
    }
  };

  // Degenerate instance: identity generator, softmax(I) classifier.
  attack::ShadowEnsemble identity{
      {{IdentityGenerator(2), *PropertyDistribution::Binary(0.7), "identity"}}};
  const PropertyClassifier clf = SoftmaxClassifier(Matrix::Identity(2, 2));
  attack::LatentOptimizationOptions options;
  options.set_size = 50;
  options.seed = 6;
  absl::StatusOr<attack::LatentCodeSet> id_codes =
      attack::OptimizeLatentSet(identity, clf, options);
  if (!id_codes.ok()) return Fail(id_codes.status());
  check(*id_codes, "identity");
  const bool identity_ok = id_codes->final_loss < kIdentityLoss;
  pass = pass && identity_ok;

  // Trained desk ensemble, several starts.
  absl::StatusOr<harness::Experiment*> e = Mixture(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<attack::ShadowEnsemble> ensemble = (*e)->Ensemble(kEnsembleMembers);
  if (!ensemble.ok()) return Fail(ensemble.status());
  for (int s = 0; s < kStarts; ++s) {
    absl::StatusOr<attack::LatentCodeSet> codes =
        (*e)->OptimizeCodes(*ensemble, "acceptance_codes", s);
    if (!codes.ok()) return Fail(codes.status());
    check(*codes, absl::StrCat("ensemble start ", s));
  }
  // Random small generators and random targets.
  std::mt19937_64 rng(66);
  for (int r = 0; r < 10; ++r) {
    attack::ShadowEnsemble random;
    for (int m = 0; m < 3; ++m) {
      auto net = nn::DenseNetwork::Create(nn::DenseNetworkSpec::Mlp(
          3, std::vector<int>{8}, 2, nn::Activation::Tanh(), nn::Activation::Tanh(),
          rng()));
      random.members.push_back(
          {*gan::Generator::Create(*net, {gan::PriorKind::kGaussianStandard, 3}),
           *PropertyDistribution::Binary(std::uniform_real_distribution<double>(0, 1)(rng)),
           absl::StrCat("random_", m)});
    }
    attack::LatentOptimizationOptions o;
    o.set_size = 20;
    o.iters = 100;
    o.seed = rng();
    absl::StatusOr<attack::LatentCodeSet> codes =
        attack::OptimizeLatentSet(random, SoftmaxClassifier(Matrix::Identity(2, 2)), o);
    if (!codes.ok()) return Fail(codes.status());
    check(*codes, absl::StrCat("random ensemble ", r));
  }
  return {pass, absl::StrCat(detail, runs, " runs with final <= initial; identity final loss ",
                             F(id_codes->final_loss), ", limit ", F(kIdentityLoss))};
}

// ---------------------------------------------------------------------------
// 7. Optimized codes beat random draws at a small budget.

Outcome Criterion7(Context& ctx) {
  absl::StatusOr<harness::Experiment*> e = Mixture(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<const std::vector<harness::ModelRecord>*> shadows = (*e)->Shadows();
  if (!shadows.ok()) return Fail(shadows.status());
  if (static_cast<int>((*shadows)->size()) != kEnsembleMembers) {
    return {false, absl::StrCat((*shadows)->size(), " shadows, expected ", kEnsembleMembers)};
  }
  absl::StatusOr<FigureResult> fig = harness::RunFigure(**e, "f10");
  if (!fig.ok()) return Fail(fig.status());
  // Independent tally from the per-record rows.
  std::map<std::string, double> optimized;
  std::map<std::string, std::vector<double>> random;
  for (const ResultRow& r : fig->rows) {
    if (r.query_count != kCompareCount) continue;
    if (r.mode == attack::AttackModeName(attack::AttackMode::kPartialBlackBox)) {
      optimized[r.target_id] = r.abs_diff;
    } else {
      random[r.target_id].push_back(r.abs_diff);
    }
  }
  int wins = 0, comparisons = 0;
  for (const auto& [id, errs] : random) {
    for (double err : errs) {
      ++comparisons;
      wins += optimized.at(id) < err;
    }
  }
  const double ratio = comparisons ? static_cast<double>(wins) / comparisons : 0.0;
  const bool pass = static_cast<int>(random.size()) >= kMinCompareTargets &&
                    comparisons >= kMinCompareTargets * kCompareTrials &&
                    ratio > kMinWinRatio;
  return {pass, absl::StrCat(random.size(), " targets x ", kCompareTrials,
                             " trials at ", kCompareCount, " samples with ",
                             kEnsembleMembers, " shadows; wins ", wins, "/",
                             comparisons, " = ", F(ratio), ", needs > ",
                             F(kMinWinRatio))};
}

// ---------------------------------------------------------------------------
// 8. Spread of per-property mean inference across starting points.

Outcome Criterion8(Context& ctx) {
  absl::StatusOr<harness::Experiment*> e = Mixture(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<FigureResult> fig = harness::RunFigure(**e, "f8");
  if (!fig.ok()) return Fail(fig.status());
  // property -> start -> inferences.
  std::map<double, std::map<int, std::vector<double>>> by;
  for (const ResultRow& r : fig->rows) by[r.p_real[0]][r.trial].push_back(r.p_infer[0]);
  bool pass = !by.empty();
  std::string detail;
  for (const auto& [p, starts] : by) {
    std::vector<double> means;
    for (const auto& [s, v] : starts) means.push_back(MeanOf(v));
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    pass = pass && static_cast<int>(means.size()) == kStarts && *hi - *lo <= kMaxStartSpan;
    absl::StrAppend(&detail, "P=", F(p), " span ", F(*hi - *lo), "; ");
  }
  return {pass, absl::StrCat(detail, kStarts, " starts, limit ", F(kMaxStartSpan))};
}

// ---------------------------------------------------------------------------
// 9 and 10. Multi-class inference and rebalancing.

// Mean over rows of `mode` of the cosine between p_infer and `reference`.
absl::StatusOr<double> MeanCosine(const std::vector<ResultRow>& rows,
                                  const std::string& mode,
                                  const std::vector<double>* reference) {
  std::vector<double> cosines;
  for (const ResultRow& r : rows) {
    if (r.mode != mode) continue;
    GANPROP_ASSIGN_OR_RETURN(
        double c, attack::CosineSimilarity(r.p_infer, reference ? *reference : r.p_real));
    cosines.push_back(c);
  }
  if (cosines.empty()) return absl::NotFoundError(absl::StrCat("no ", mode, " rows"));
  return MeanOf(cosines);
}

Outcome Criterion9(Context& ctx) {
  absl::StatusOr<harness::Experiment*> e = Digits(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<FigureResult> fig = harness::RunFigure(**e, "f14");
  if (!fig.ok()) return Fail(fig.status());
  absl::StatusOr<double> cosine = MeanCosine(fig->rows, "full_bb", nullptr);
  if (!cosine.ok()) return Fail(cosine.status());
  double worst = 1.0;
  for (const auto& row : CsvRows(fig->csv)) worst = std::min(worst, ToDouble(row[3]));
  ctx.multiclass_cosine = *cosine;
  return {*cosine >= kMinCosine,
          absl::StrCat((*e)->config().n_classes, " classes, ", fig->rows.size(),
                       " attacks of ", kFullSamples, " samples; mean cosine ",
                       F(*cosine), " (worst ", F(worst), "), needs >= ", F(kMinCosine))};
}

Outcome Criterion10(Context& ctx) {
  if (!ctx.multiclass_cosine) {
    const Outcome nine = Criterion9(ctx);
    if (!ctx.multiclass_cosine) return {false, "criterion 9 produced no cosine: " + nine.detail};
  }
  absl::StatusOr<harness::Experiment*> e = Digits(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<FigureResult> fig = harness::RunFigure(**e, "f15");
  if (!fig.ok()) return Fail(fig.status());
  absl::StatusOr<double> after = MeanCosine(fig->rows, "full_bb_rebalanced", nullptr);
  if (!after.ok()) return Fail(after.status());
  const std::vector<double> uniform =
      PropertyDistribution::Uniform((*e)->config().n_classes).probs();
  absl::StatusOr<double> to_uniform = MeanCosine(fig->rows, "full_bb_rebalanced", &uniform);
  if (!to_uniform.ok()) return Fail(to_uniform.status());
  return {*after < *ctx.multiclass_cosine,
          absl::StrCat("cosine to original ", F(*ctx.multiclass_cosine), " -> ", F(*after),
                       " after rebalancing (cosine to uniform ", F(*to_uniform), ")")};
}

// ---------------------------------------------------------------------------
// 11. Membership inference mechanics.

double PairCountAuc(const std::vector<double>& s, const std::vector<bool>& member) {
  double wins = 0.0, pairs = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (!member[i]) continue;
    for (size_t j = 0; j < s.size(); ++j) {
      if (member[j]) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

Outcome Criterion11() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto make_generator = [&](uint64_t seed) {
    auto net = nn::DenseNetwork::Create(nn::DenseNetworkSpec::Mlp(
        3, std::vector<int>{8}, 2, nn::Activation::Tanh(), nn::Activation::Tanh(), seed));
    return *gan::Generator::Create(*net, {gan::PriorKind::kGaussianStandard, 3});
  };
  const gan::Generator a = make_generator(1), b = make_generator(2);

  // Antisymmetry of the calibrated error.
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x = {normal(rng), normal(rng)};
    const uint64_t seed = rng();
    absl::StatusOr<membership::MiaScore> ab = membership::CalibratedError(x, a, b, 64, seed);
    absl::StatusOr<membership::MiaScore> ba = membership::CalibratedError(x, b, a, 64, seed);
    if (!ab.ok()) return Fail(ab.status());
    if (!ba.ok()) return Fail(ba.status());
    if (ab->calibrated != -ba->calibrated) {
      return {false, absl::StrCat("antisymmetry broken at sample ", i)};
    }
  }

  // lambda_p = 0 makes the enhanced rule the baseline rule.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    membership::MiaScore score;
    score.calibrated = normal(rng);
    const int attributes = 1 + i % 3;
    std::vector<PropertyDistribution> props;
    for (int k = 0; k < attributes; ++k) {
      props.push_back(*PropertyDistribution::Binary(u(rng)));
      score.attribute_classes.push_back(static_cast<int>(rng() % 2));
    }
    membership::MiaConfig config;
    config.lambda_p = 0.0;
    config.epsilon = normal(rng);
    absl::StatusOr<double> enhanced =
        membership::DecisionStatistic(score, props, config, true);
    absl::StatusOr<double> baseline =
        membership::DecisionStatistic(score, props, config, false);
    absl::StatusOr<bool> d_enhanced = membership::Decide(score, props, config, true);
    absl::StatusOr<bool> d_baseline = membership::Decide(score, props, config, false);
    if (!enhanced.ok()) return Fail(enhanced.status());
    if (!baseline.ok()) return Fail(baseline.status());
    if (!d_enhanced.ok()) return Fail(d_enhanced.status());
    if (!d_baseline.ok()) return Fail(d_baseline.status());
    if (*enhanced != *baseline || *d_enhanced != *d_baseline) {
      return {false, absl::StrCat("lambda 0 reduction broken at case ", i)};
    }
  }

  // AUC against pair counting, and under monotone transforms.
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 200);
    std::vector<double> s(n);
    std::vector<bool> member(n);
    for (int i = 0; i < n; ++i) {
      s[i] = std::round(normal(rng) * 4.0) / 4.0;  // quarter steps force ties
      member[i] = i == 0 || (i != 1 && rng() % 3 == 0);
    }
    const std::unique_ptr<bool[]> flags(new bool[n]);
    std::copy(member.begin(), member.end(), flags.get());
    const std::span<const bool> members(flags.get(), n);
    absl::StatusOr<double> auc = membership::Auc(s, members);
    if (!auc.ok()) return Fail(auc.status());
    worst = std::max(worst, std::abs(*auc - PairCountAuc(s, member)));
    std::vector<double> exp_s(n), affine_s(n);
    for (int i = 0; i < n; ++i) {
      exp_s[i] = std::exp(s[i]);
      affine_s[i] = 3.0 * s[i] + 1.0;
    }
    absl::StatusOr<double> auc_exp = membership::Auc(exp_s, members);
    absl::StatusOr<double> auc_affine = membership::Auc(affine_s, members);
    if (!auc_exp.ok()) return Fail(auc_exp.status());
    if (!auc_affine.ok()) return Fail(auc_affine.status());
    if (*auc_exp != *auc || *auc_affine != *auc) {
      return {false, absl::StrCat("AUC changed under a monotone transform, case ", t)};
    }
  }
  return {worst <= kAucOracleTolerance,
          absl::StrCat("antisymmetry exact on 50 samples; lambda 0 reduction exact on "
                       "500 cases; AUC max deviation from pair counting ",
                       F(worst), " over 200 sets, limit ", F(kAucOracleTolerance),
                       "; exp and affine transforms leave AUC unchanged")};
}

// ---------------------------------------------------------------------------
// 12. Property-enhanced membership inference.

Outcome Criterion12(Context& ctx) {
  absl::StatusOr<harness::Experiment*> e = Mixture(ctx);
  if (!e.ok()) return Fail(e.status());
  absl::StatusOr<harness::MiaOutcome> mia = harness::RunMia(**e);
  if (!mia.ok()) return Fail(mia.status());
  int members = 0;
  for (const membership::MiaScore& s : mia->scores) members += s.member;
  const int non_members = static_cast<int>(mia->scores.size()) - members;
  const bool pass = members == kMiaMembers && non_members == kMiaNonMembers &&
                    mia->true_property.proportion() == kMiaProperty &&
                    mia->auc_enhanced_true >= mia->auc_baseline + kMinAucGain &&
                    mia->auc_half == mia->auc_baseline;
  return {pass, absl::StrCat(members, ":", non_members, " at P=",
                             F(mia->true_property.proportion()), "; AUC baseline ",
                             F(mia->auc_baseline), ", enhanced ",
                             F(mia->auc_enhanced_true), " (gain needs >= ",
                             F(kMinAucGain), "), with P=0.5 ", F(mia->auc_half),
                             mia->auc_half == mia->auc_baseline ? " (equal)" : " (differs)")};
}

// ---------------------------------------------------------------------------
// 13. Reruns are byte-identical.

Outcome Criterion13(Context& ctx) {
  absl::StatusOr<ExperimentConfig> config = LoadPinned(ctx, "smoke");
  if (!config.ok()) return Fail(config.status());
  std::vector<std::string> csv, digest;
  for (const char* run : {"determinism_a", "determinism_b"}) {
    ExperimentConfig c = *config;
    c.output_dir = (ctx.runs / run).string();
    fs::remove_all(c.output_dir);
    absl::StatusOr<std::vector<ResultRow>> rows = harness::RunTask(c);
    if (!rows.ok()) return Fail(rows.status());
    absl::StatusOr<std::string> text = nn::ReadTextFile(fs::path(c.output_dir) / "results.csv");
    absl::StatusOr<std::string> sha =
        nn::ReadTextFile(fs::path(c.output_dir) / "results.csv.sha256");
    if (!text.ok()) return Fail(text.status());
    if (!sha.ok()) return Fail(sha.status());
    csv.push_back(*text);
    digest.push_back(*sha);
  }
  const bool pass = csv[0] == csv[1] && digest[0] == digest[1] &&
                    digest[0].rfind(harness::Sha256Hex(csv[0]), 0) == 0;
  return {pass, absl::StrCat("two fresh runs, ", csv[0].size(), " bytes of results, ",
                             csv[0] == csv[1] ? "identical" : "different")};
}

}  // namespace
}  // namespace ganprop

int main(int argc, char** argv) {
  using namespace ganprop;
  CLI::App app("ganprop acceptance suite");
  std::string configs = GANPROP_CONFIG_DIR;
  std::string runs = "acceptance_runs";
  std::vector<int> only;
  bool keep = false;
  app.add_option("--configs", configs, "directory holding the .conf files");
  app.add_option("--runs", runs, "scratch directory for run outputs");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_flag("--keep", keep, "reuse models already trained under --runs");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.configs = configs;
  ctx.runs = runs;
  if (!keep) fs::remove_all(ctx.runs);

  const std::vector<std::function<Outcome()>> criteria = {
      [] { return Criterion1(); },        [] { return Criterion2(); },
      [] { return Criterion3(); },        [&] { return Criterion4(ctx); },
      [&] { return Criterion5(ctx); },    [&] { return Criterion6(ctx); },
      [&] { return Criterion7(ctx); },    [&] { return Criterion8(ctx); },
      [&] { return Criterion9(ctx); },    [&] { return Criterion10(ctx); },
      [] { return Criterion11(); },       [&] { return Criterion12(ctx); },
      [&] { return Criterion13(ctx); }};
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[i]();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
