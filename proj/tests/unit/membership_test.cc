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

#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace ganprop::membership {
namespace {

gan::Generator RandomGenerator(int latent, int width, uint64_t seed) {
  auto net = nn::DenseNetwork::Create(nn::DenseNetworkSpec::Mlp(
      latent, std::vector<int>{8}, width, nn::Activation::LeakyRelu(0.2),
      nn::Activation::Tanh(), seed));
  return *gan::Generator::Create(*net, {gan::PriorKind::kGaussianStandard, latent});
}

std::vector<double> Row(const Matrix& m, Eigen::Index i) {
  std::vector<double> v(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) v[c] = m(i, c);
  return v;
}

PropertyDistribution Bin(double p) { return *PropertyDistribution::Binary(p); }

// Wins plus half ties over all member/non-member pairs.
double PairCountAuc(const std::vector<double>& s, const std::vector<bool>& m) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = 0; j < s.size(); ++j) {
      if (!m[i] || m[j]) continue;
      den += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / den;
}

absl::StatusOr<double> AucOf(const std::vector<double>& s,
                             const std::vector<bool>& m) {
  auto flags = std::make_unique<bool[]>(m.size());
  for (size_t i = 0; i < m.size(); ++i) flags[i] = m[i];
  return Auc(s, std::span<const bool>(flags.get(), m.size()));
}

TEST(ReconstructTest, SelfMatchIsZero) {
  const gan::Generator g = RandomGenerator(3, 2, 1);
  const Matrix bank = *g.SampleBlind(50, 7);
  auto r = Reconstruct(g, Row(bank, 17), 50, 7);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->distance, 0.0);
  EXPECT_EQ(r->index, 17);
}

TEST(ReconstructTest, SingleSampleBudget) {
  const gan::Generator g = RandomGenerator(3, 2, 1);
  const std::vector<double> x = {0.3, -0.2};
  auto r = Reconstruct(g, x, 1, 4);
  ASSERT_TRUE(r.ok());
  const Matrix only = *g.SampleBlind(1, 4);
  EXPECT_TRUE(r->nearest == only.row(0));
  EXPECT_EQ(r->distance, SquaredEuclidean(x, Row(only, 0)));
}

TEST(ReconstructTest, MatchesExhaustiveScan) {
  const gan::Generator g = RandomGenerator(3, 4, 2);
  const Matrix bank = *g.SampleBlind(200, 3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int q = 0; q < 20; ++q) {
    std::vector<double> x(4);
    for (double& v : x) v = u(rng);
    double best = 1e300;
    for (int i = 0; i < 200; ++i) best = std::min(best, SquaredEuclidean(x, Row(bank, i)));
    auto r = Reconstruct(g, x, 200, 3);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->distance, best);
  }
  EXPECT_FALSE(Reconstruct(g, std::vector<double>{0.0}, 10, 3).ok());
  EXPECT_FALSE(Reconstruct(g, std::vector<double>(4, 0.0), 0, 3).ok());
}

TEST(CalibratedErrorTest, IdentityAntisymmetryAndReplay) {
  const gan::Generator a = RandomGenerator(3, 2, 1);
  const gan::Generator b = RandomGenerator(3, 2, 2);
  const std::vector<double> x = {0.1, 0.4};
  auto same = CalibratedError(x, a, a, 64, 9);
  ASSERT_TRUE(same.ok());
  EXPECT_EQ(same->calibrated, 0.0);
  auto ab = CalibratedError(x, a, b, 64, 9);
  auto ba = CalibratedError(x, b, a, 64, 9);
  ASSERT_TRUE(ab.ok() && ba.ok());
  EXPECT_EQ(ab->calibrated, -ba->calibrated);
  // Two separate passes over the same paired draws.
  const double raw = Reconstruct(a, x, 64, 9)->distance;
  const double ref = Reconstruct(b, x, 64, 9)->distance;
  EXPECT_EQ(ab->raw, raw);
  EXPECT_EQ(ab->reference, ref);
  EXPECT_EQ(ab->calibrated, raw - ref);
}

TEST(CalibratedErrorTest, BatchEqualsPerSample) {
  const gan::Generator a = RandomGenerator(3, 2, 1);
  const gan::Generator b = RandomGenerator(3, 2, 2);
  const Matrix x = Matrix::Random(15, 2);
  auto scores = ScoreSamples(x, a, b, 128, 4);
  ASSERT_TRUE(scores.ok());
  for (int i = 0; i < 15; ++i) {
    auto one = CalibratedError(Row(x, i), a, b, 128, 4);
    EXPECT_EQ((*scores)[i].calibrated, one->calibrated);
    EXPECT_EQ((*scores)[i].raw - (*scores)[i].reference, (*scores)[i].calibrated);
  }
}

TEST(DecideTest, ThresholdArithmetic) {
  MiaScore s;
  s.attribute_classes = {1};
  MiaConfig config;
  config.epsilon = 0.1;
  config.lambda_p = 2.0;
  const std::vector<PropertyDistribution> props = {Bin(0.3)};
  auto margin = DecisionStatistic(s, props, config, true);
  ASSERT_TRUE(margin.ok());
  EXPECT_NEAR(*margin, -0.7, 1e-15);
  s.calibrated = -0.8;
  EXPECT_TRUE(*Decide(s, props, config, true));
  s.calibrated = -0.6;
  EXPECT_FALSE(*Decide(s, props, config, true));
  EXPECT_TRUE(*Decide(s, props, config, false));
}

TEST(DecideTest, ReductionsToBaseline) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  MiaConfig config;
  config.epsilon = 0.05;
  for (int i = 0; i < 200; ++i) {
    MiaScore s;
    s.calibrated = n(rng) * 0.1;
    s.attribute_classes = {i % 2};
    config.lambda_p = 0.0;
    const std::vector<PropertyDistribution> skew = {Bin(0.3)};
    EXPECT_EQ(*DecisionStatistic(s, skew, config, true),
              *DecisionStatistic(s, skew, config, false));
    EXPECT_EQ(*Decide(s, skew, config, true), *Decide(s, skew, config, false));
    config.lambda_p = 2.0;
    const std::vector<PropertyDistribution> half = {Bin(0.5)};
    EXPECT_EQ(*DecisionStatistic(s, half, config, true),
              *DecisionStatistic(s, half, config, false));
  }
}

TEST(DecideTest, Errors) {
  MiaScore s;
  s.attribute_classes = {1};
  MiaConfig config;
  const std::vector<PropertyDistribution> props = {Bin(0.3)};
  EXPECT_FALSE(Decide(s, props, config, false).ok()) << "epsilon unset";
  config.epsilon = 0.0;
  EXPECT_FALSE(Decide(s, {}, config, true).ok());
  s.attribute_classes = {};
  EXPECT_FALSE(Decide(s, props, config, true).ok());
  s.attribute_classes = {2};
  EXPECT_FALSE(Decide(s, props, config, true).ok());
}

TEST(EnhancementTermTest, AveragesOverAttributes) {
  const std::vector<PropertyDistribution> props = {
      Bin(0.3), *PropertyDistribution::Create({0.2, 0.5, 0.3})};
  const std::vector<int> classes = {0, 1};
  // 2 * ((2 * 0.7 - 1) + (2 * 0.5 - 1)) / 2.
  EXPECT_NEAR(*EnhancementTerm(classes, props, 2.0), 0.4, 1e-15);
}

TEST(AucTest, BasicCases) {
  EXPECT_EQ(*AucOf({3, 4, 1, 2}, {true, true, false, false}), 1.0);
  EXPECT_EQ(*AucOf({1, 2, 3, 4}, {true, true, false, false}), 0.0);
  EXPECT_EQ(*AucOf({5, 5, 5, 5}, {true, false, true, false}), 0.5);
  EXPECT_FALSE(AucOf({1, 2}, {true, true}).ok());
  EXPECT_FALSE(AucOf({1, 2}, {true}).ok());
}

TEST(AucTest, ToyListMatchesPairCount) {
  const std::vector<double> s = {0.3, -1.0, 0.3, 2.0, 0.1, 0.3};
  const std::vector<bool> m = {true, false, false, true, true, false};
  // Member/non-member pairs: 9; wins 0.3>-1, 2>all three, 0.1>-1 (5) plus
  // ties 0.3=0.3 twice (1) -> 6/9.
  EXPECT_NEAR(*AucOf(s, m), 6.0 / 9.0, 1e-12);
  EXPECT_NEAR(*AucOf(s, m), PairCountAuc(s, m), 1e-12);
}

TEST(AucTest, RandomInputsMatchPairCountAndMonotoneInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> level(0, 6);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(60);
    std::vector<bool> m(60);
    for (int i = 0; i < 60; ++i) {
      s[i] = level(rng) * 0.25 - 0.5;
      m[i] = coin(rng);
    }
    m[0] = true;
    m[1] = false;
    const double auc = *AucOf(s, m);
    EXPECT_NEAR(auc, PairCountAuc(s, m), 1e-12);
    std::vector<double> t(60);
    for (int i = 0; i < 60; ++i) t[i] = std::exp(3 * s[i]) + 7;
    EXPECT_EQ(*AucOf(t, m), auc);
  }
}

TEST(RocTest, TrapezoidAreaEqualsAuc) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> level(0, 5);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> s(40);
    std::vector<bool> m(40);
    for (int i = 0; i < 40; ++i) {
      s[i] = level(rng);
      m[i] = coin(rng);
    }
    m[0] = true;
    m[1] = false;
    auto flags = std::make_unique<bool[]>(m.size());
    for (size_t i = 0; i < m.size(); ++i) flags[i] = m[i];
    auto roc = RocCurve(s, std::span<const bool>(flags.get(), m.size()));
    ASSERT_TRUE(roc.ok());
    EXPECT_EQ(roc->front().fpr, 0.0);
    EXPECT_EQ(roc->back().tpr, 1.0);
    double area = 0.0;
    for (size_t i = 1; i < roc->size(); ++i) {
      area += ((*roc)[i].fpr - (*roc)[i - 1].fpr) *
              ((*roc)[i].tpr + (*roc)[i - 1].tpr) / 2.0;
    }
    EXPECT_NEAR(area, PairCountAuc(s, m), 1e-12);
  }
}

TEST(SweepTest, FixedPointsAndCsv) {
  std::vector<MiaScore> scores;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.1);
  for (int i = 0; i < 40; ++i) {
    MiaScore s;
    s.id = i;
    s.member = i % 4 == 0;
    s.attribute_classes = {i % 3 == 0 ? 1 : 0};
    s.calibrated = n(rng) - (s.member ? 0.05 : 0.0);
    scores.push_back(s);
  }
  MiaConfig config;
  const std::vector<double> deviations = {0.0, 0.2, -0.5, 0.9};
  auto sweep = SensitivitySweep(scores, 0.3, deviations, config);
  ASSERT_TRUE(sweep.ok());
  const std::vector<PropertyDistribution> truth = {Bin(0.3)};
  EXPECT_EQ((*sweep)[0].auc, *EvaluateAuc(scores, truth, config, true));
  EXPECT_EQ((*sweep)[1].proportion, 0.5);
  EXPECT_EQ((*sweep)[1].auc, *EvaluateAuc(scores, truth, config, false));
  EXPECT_EQ((*sweep)[2].proportion, 0.0);
  EXPECT_EQ((*sweep)[3].proportion, 1.0);
  const std::vector<double> bad = {1.5};
  EXPECT_FALSE(SensitivitySweep(scores, 0.3, bad, config).ok());
  const std::string csv = SweepCsv(*sweep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "deviation,proportion,auc");
  const std::string score_csv = ScoresCsv(scores, {});
  EXPECT_EQ(std::count(score_csv.begin(), score_csv.end(), '\n'), 41);
}

}  // namespace
}  // namespace ganprop::membership
