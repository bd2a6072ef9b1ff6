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
#include <numeric>
#include <random>

#include "gtest/gtest.h"

namespace ganprop::attack {
namespace {

using classifier::PropertyClassifier;

// Replays stored rows in order, cycling; the seed is ignored.
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

PropertyClassifier Softmax(const Matrix& w, Eigen::RowVectorXd b) {
  const int k = static_cast<int>(w.cols());
  nn::DenseNetworkSpec spec{{static_cast<int>(w.rows()), k},
                            {nn::Activation::Softmax()}, 0};
  return *PropertyClassifier::Create(
      *nn::DenseNetwork::FromLayers(spec, {nn::DenseLayer{w, std::move(b)}}),
      data::AttributeSpec::Numbered(k));
}

// 1-d input: sigmoid(scale * x).
PropertyClassifier Sigmoid1d(double scale, double bias = 0.0) {
  nn::DenseNetworkSpec spec{{1, 1}, {nn::Activation::Sigmoid()}, 0};
  return *PropertyClassifier::Create(
      *nn::DenseNetwork::FromLayers(
          spec, {nn::DenseLayer{Matrix::Constant(1, 1, scale),
                                Eigen::RowVectorXd::Constant(1, bias)}}),
      data::AttributeSpec::Binary());
}

gan::Generator IdentityGenerator(int dim) {
  std::vector<nn::Activation> acts = {nn::Activation::Identity()};
  nn::DenseNetworkSpec spec{{dim, dim}, acts, 0};
  auto net = nn::DenseNetwork::FromLayers(
      spec, {nn::DenseLayer{Matrix::Identity(dim, dim),
                            Eigen::RowVectorXd::Zero(dim)}});
  return *gan::Generator::Create(*net, {gan::PriorKind::kGaussianStandard, dim});
}

gan::Generator RandomGenerator(int latent, int width, uint64_t seed) {
  auto net = nn::DenseNetwork::Create(nn::DenseNetworkSpec::Mlp(
      latent, std::vector<int>{8}, width, nn::Activation::LeakyRelu(0.2),
      nn::Activation::Tanh(), seed));
  return *gan::Generator::Create(*net, {gan::PriorKind::kGaussianStandard, latent});
}

PropertyDistribution Bin(double p) { return *PropertyDistribution::Binary(p); }

TEST(PhiTest, HardCountsArgmax) {
  Matrix p(4, 2);
  p << 0.1, 0.9, 0.8, 0.2, 0.3, 0.7, 0.4, 0.6;
  auto phi = Phi(p, PhiMode::kHard);
  ASSERT_TRUE(phi.ok());
  EXPECT_EQ(phi->proportion(), 0.75);
}

TEST(PhiTest, SoftAverages) {
  Matrix p(2, 2);
  p << 1, 0, 0, 1;
  auto phi = Phi(p, PhiMode::kSoft);
  ASSERT_TRUE(phi.ok());
  EXPECT_EQ((*phi)[0], 0.5);
  EXPECT_EQ((*phi)[1], 0.5);
}

TEST(PhiTest, EmptyRejected) {
  EXPECT_FALSE(Phi(Matrix(0, 2), PhiMode::kHard).ok());
  EXPECT_FALSE(Phi(Matrix(0, 2), PhiMode::kSoft).ok());
}

TEST(PhiTest, HardMatchesExhaustiveCounting) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> classes(2, 6);
  for (int batch = 0; batch < 200; ++batch) {
    const int k = classes(rng);
    Matrix p(37, k);
    for (int i = 0; i < p.rows(); ++i) {
      for (int c = 0; c < k; ++c) p(i, c) = std::round(u(rng) * 4) / 4;
      p.row(i) /= std::max(p.row(i).sum(), 1e-9);
    }
    auto phi = Phi(p, PhiMode::kHard);
    ASSERT_TRUE(phi.ok());
    for (int c = 0; c < k; ++c) {
      int count = 0;
      for (int i = 0; i < p.rows(); ++i) {
        bool is_max = true;
        for (int d = 0; d < k; ++d) {
          if (p(i, d) > p(i, c) || (d > c && p(i, d) == p(i, c))) is_max = false;
        }
        count += is_max;
      }
      EXPECT_EQ((*phi)[c], static_cast<double>(count) / p.rows());
    }
  }
}

TEST(SoftPhiTest, TapeMatchesValuesForBothHeads) {
  const Matrix x = Matrix::Random(6, 1);
  for (const PropertyClassifier& clf :
       {Sigmoid1d(2.0, 0.1), Softmax(Matrix::Random(1, 3), Eigen::RowVectorXd::Random(3))}) {
    nn::Tape tape;
    const nn::Var phi = SoftPhi(tape, clf, tape.Constant(x));
    auto expected = Phi(*clf.PredictProba(x), PhiMode::kSoft);
    ASSERT_TRUE(expected.ok());
    ASSERT_EQ(phi.cols(), clf.n_classes());
    for (int c = 0; c < clf.n_classes(); ++c) {
      EXPECT_NEAR(phi.value()(0, c), (*expected)[c], 1e-15);
    }
  }
}

TEST(MetricTest, AbsDiff) {
  EXPECT_NEAR(*AbsDiff(Bin(0.48), Bin(0.50)), 0.02, 1e-15);
  EXPECT_EQ(*AbsDiff(Bin(0.3), Bin(0.3)), 0.0);
  auto a = *PropertyDistribution::Create({0.5, 0.5, 0.0});
  auto b = *PropertyDistribution::Create({0.0, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(*AbsDiff(a, b), 0.5);
  EXPECT_FALSE(AbsDiff(a, Bin(0.5)).ok());
}

TEST(MetricTest, Cosine) {
  EXPECT_DOUBLE_EQ(*CosineSimilarity(std::vector<double>{0.2, 0.3, 0.5},
                                     std::vector<double>{0.2, 0.3, 0.5}),
                   1.0);
  EXPECT_EQ(*CosineSimilarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}),
            0.0);
  EXPECT_FALSE(
      CosineSimilarity(std::vector<double>{0, 0}, std::vector<double>{0, 1}).ok());
  EXPECT_FALSE(
      CosineSimilarity(std::vector<double>{1}, std::vector<double>{0, 1}).ok());
}

TEST(AttackFullBbTest, ConstantClassifierGivesOne) {
  const PropertyClassifier all_one = Sigmoid1d(0.0, 5.0);
  ReplaySampler target(Matrix::Random(10, 1));
  auto report = AttackFullBb(target, all_one, 50, 3);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->inferred.proportion(), 1.0);
  EXPECT_EQ(report->query_count, 50);
  EXPECT_EQ(report->mode, AttackMode::kFullBlackBox);
}

TEST(AttackFullBbTest, ReplayStubWithPerfectClassifierIsExact) {
  Matrix rows(40, 1);
  int ones = 0;
  for (int i = 0; i < 40; ++i) {
    const bool one = (i * 7) % 5 < 2;
    rows(i, 0) = one ? 1.0 : -1.0;
    ones += one;
  }
  ReplaySampler target(rows);
  auto report = AttackFullBb(target, Sigmoid1d(20.0), 40, 0);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->inferred.proportion(), ones / 40.0);
  // Every row twice.
  auto doubled = AttackFullBb(target, Sigmoid1d(20.0), 80, 0);
  EXPECT_EQ(doubled->inferred.proportion(), report->inferred.proportion());
  // Reversed order.
  ReplaySampler reversed(rows.colwise().reverse());
  EXPECT_EQ(AttackFullBb(reversed, Sigmoid1d(20.0), 40, 0)->inferred.proportion(),
            report->inferred.proportion());
  EXPECT_FALSE(AttackFullBb(target, Sigmoid1d(20.0), 0, 0).ok());
}

TEST(AttackFullBbTest, ShapeMismatchPropagates) {
  ReplaySampler target(Matrix::Random(4, 3));
  EXPECT_FALSE(AttackFullBb(target, Sigmoid1d(1.0), 4, 0).ok());
}

TEST(AttackPartialBbTest, RandomCodesMatchFullAttack) {
  const gan::Generator g = RandomGenerator(3, 1, 5);
  const PropertyClassifier clf = Sigmoid1d(4.0);
  const LatentCodeSet codes = RandomCodes(g.prior(), 64, 9);
  auto partial = AttackPartialBb(g, clf, codes);
  auto full = AttackFullBb(g, clf, 64, 9);
  ASSERT_TRUE(partial.ok() && full.ok());
  EXPECT_EQ(partial->inferred, full->inferred);
  EXPECT_EQ(partial->mode, AttackMode::kPartialBlackBox);
  EXPECT_EQ(partial->query_count, 64);

  LatentCodeSet permuted = codes;
  permuted.codes = codes.codes.colwise().reverse();
  EXPECT_EQ(AttackPartialBb(g, clf, permuted)->inferred, partial->inferred);

  LatentCodeSet wrong = codes;
  wrong.codes = Matrix::Zero(4, 2);
  EXPECT_FALSE(AttackPartialBb(g, clf, wrong).ok());
}

TEST(AttackReportTest, GroundTruthAndJson) {
  AttackReport r;
  r.inferred = Bin(0.48);
  ASSERT_TRUE(r.SetGroundTruth(Bin(0.5)).ok());
  EXPECT_NEAR(*r.abs_diff, 0.02, 1e-15);
  const nlohmann::json j = r.ToJson();
  EXPECT_EQ(j["mode"], "full_bb");
  EXPECT_EQ(j["phi"], "hard");
  EXPECT_EQ(j["real"][1], 0.5);
}

TEST(ShadowGridTest, BalancedAssignment) {
  const std::vector<PropertyDistribution> grid = {Bin(0.3), Bin(0.5), Bin(0.7)};
  const auto props = ShadowGridProperties(grid, 20);
  ASSERT_EQ(props.size(), 20u);
  ShadowEnsemble e;
  for (int k = 0; k < 20; ++k) {
    e.members.push_back({RandomGenerator(2, 1, k), props[k], absl::StrCat(k)});
  }
  EXPECT_TRUE(e.Validate().ok());
  EXPECT_TRUE(CheckGridBalance(e, grid).ok());
  e.members[0].property = Bin(0.5);
  e.members[3].property = Bin(0.5);
  EXPECT_FALSE(CheckGridBalance(e, grid).ok());
  e.members[0].property = Bin(0.4);
  EXPECT_FALSE(CheckGridBalance(e, grid).ok());
  e.members.push_back({RandomGenerator(3, 1, 0), Bin(0.3), "odd"});
  EXPECT_FALSE(e.Validate().ok());
  EXPECT_FALSE(ShadowEnsemble{}.Validate().ok());
}

TEST(OptimizeLatentSetTest, ZeroItersReturnsInit) {
  ShadowEnsemble e{{{IdentityGenerator(2), Bin(0.7), "id"}}};
  const PropertyClassifier clf = Softmax(Matrix::Identity(2, 2), Eigen::RowVectorXd::Zero(2));
  LatentOptimizationOptions options;
  options.iters = 0;
  const LatentCodeSet init = RandomCodes(e.members[0].generator.prior(), 10, 1);
  auto out = OptimizeLatentSet(e, clf, options, init);
  ASSERT_TRUE(out.ok());
  EXPECT_TRUE(out->codes == init.codes);
  ASSERT_EQ(out->trace.size(), 1u);
  EXPECT_EQ(out->final_loss, out->initial_loss);
  EXPECT_EQ(out->initial_loss, *EnsembleLoss(e, clf, init.codes));
}

TEST(OptimizeLatentSetTest, IdentityGeneratorReachesTarget) {
  ShadowEnsemble e{{{IdentityGenerator(2), Bin(0.7), "id"}}};
  const PropertyClassifier clf =
      Softmax(Matrix::Identity(2, 2), Eigen::RowVectorXd::Zero(2));
  LatentOptimizationOptions options;
  options.set_size = 50;
  options.seed = 4;
  auto out = OptimizeLatentSet(e, clf, options);
  ASSERT_TRUE(out.ok());
  EXPECT_FALSE(out->failed);
  EXPECT_EQ(out->origin, CodeOrigin::kOptimized);
  EXPECT_EQ(out->size(), 50);
  EXPECT_LT(out->final_loss, 1e-4);
  EXPECT_LE(out->final_loss, out->initial_loss);
  EXPECT_NEAR(*EnsembleLoss(e, clf, out->codes), out->final_loss, 1e-15);
  const Matrix probs = *clf.PredictProba(out->codes);
  EXPECT_NEAR(probs.col(1).mean(), 0.7, 1e-2);
  EXPECT_GT(out->max_norm, 0.0);
}

TEST(OptimizeLatentSetTest, EnsembleLossNeverIncreases) {
  ShadowEnsemble e;
  for (int k = 0; k < 4; ++k) {
    e.members.push_back({RandomGenerator(3, 1, 10 + k), Bin(0.3 + 0.1 * k),
                         absl::StrCat(k)});
  }
  const PropertyClassifier clf = Sigmoid1d(3.0);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    LatentOptimizationOptions options;
    options.iters = 60;
    options.set_size = 20;
    options.seed = seed;
    auto out = OptimizeLatentSet(e, clf, options);
    ASSERT_TRUE(out.ok());
    EXPECT_LE(out->final_loss, out->initial_loss);
    EXPECT_EQ(out->final_loss, *std::min_element(out->trace.begin(), out->trace.end()));
  }
}

TEST(OptimizeLatentSetTest, DivergenceKeepsBestSoFar) {
  ShadowEnsemble e{{{IdentityGenerator(2), Bin(0.7), "id"}}};
  const PropertyClassifier clf =
      Softmax(Matrix::Identity(2, 2), Eigen::RowVectorXd::Zero(2));
  LatentOptimizationOptions options;
  options.optimizer = nn::OptimizerConfig::Adam(1e308, 0.9, 0.999);
  options.set_size = 5;
  auto out = OptimizeLatentSet(e, clf, options);
  ASSERT_TRUE(out.ok());
  EXPECT_TRUE(out->failed);
  ASSERT_FALSE(out->trace.empty());
  EXPECT_TRUE(std::isfinite(out->final_loss));
  EXPECT_LE(out->final_loss, out->initial_loss);
}

TEST(OptimizeLatentSetTest, RejectsIncompatibleClassifier) {
  ShadowEnsemble e{{{IdentityGenerator(2), Bin(0.7), "id"}}};
  EXPECT_FALSE(OptimizeLatentSet(e, Sigmoid1d(1.0), {}).ok());
  EXPECT_FALSE(OptimizeLatentSet(ShadowEnsemble{}, Sigmoid1d(1.0), {}).ok());
}

TEST(CompareModesTest, TiesAreNotWins) {
  const std::vector<double> same = {0.1, 0.2, 0.0};
  EXPECT_EQ(WinRatio(same, same), 0.0);
  EXPECT_EQ(WinRatio(std::vector<double>{0.0, 0.3},
                     std::vector<double>{0.1, 0.2}),
            0.5);
}

TEST(CompareModesTest, ConstantClassifierGivesZeroRatio) {
  const gan::Generator g = RandomGenerator(2, 1, 3);
  ShadowEnsemble e{{{g, Bin(0.3), "s0"}, {RandomGenerator(2, 1, 4), Bin(0.7), "s1"}}};
  const PropertyClassifier constant = Sigmoid1d(0.0, 5.0);
  const std::vector<AttackTarget> targets = {{&g, Bin(0.5), "t0"}};
  LatentOptimizationOptions options;
  options.iters = 5;
  const std::vector<int> counts = {16, 32};
  auto result = CompareModes(targets, constant, e, counts, 4, options, 1);
  ASSERT_TRUE(result.ok()) << result.status();
  ASSERT_EQ(result->summary.size(), 2u);
  for (const ModeComparison& row : result->summary) {
    EXPECT_EQ(row.ratio, 0.0);
    EXPECT_EQ(row.comparisons, 4);
  }
  EXPECT_EQ(result->records.size(), 2u * (1 + 4));
}

}  // namespace
}  // namespace ganprop::attack
