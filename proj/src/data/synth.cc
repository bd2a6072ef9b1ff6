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

#include "ganprop/data/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "ganprop/common/random.h"

namespace ganprop::data {
namespace {

// 8x8 glyphs, '#' = ink.
constexpr const char* kGlyphs[kNumDigitTemplates][kDigitSide] = {
    {"..####..", ".#....#.", ".#...##.", ".#..#.#.", ".#.#..#.", ".##...#.",
     ".#....#.", "..####.."},
    {"...##...", "..###...", ".#.##...", "...##...", "...##...", "...##...",
     "...##...", ".######."},
    {"..####..", ".#....#.", "......#.", ".....#..", "....#...", "...#....",
     "..#.....", ".######."},
    {"..####..", ".#....#.", "......#.", "...###..", "......#.", "......#.",
     ".#....#.", "..####.."},
    {"....##..", "...#.#..", "..#..#..", ".#...#..", ".######.", ".....#..",
     ".....#..", ".....#.."},
    {".######.", ".#......", ".#......", ".#####..", "......#.", "......#.",
     ".#....#.", "..####.."},
    {"..####..", ".#......", ".#......", ".#####..", ".#....#.", ".#....#.",
     ".#....#.", "..####.."},
    {".######.", "......#.", ".....#..", "....#...", "...#....", "...#....",
     "...#....", "...#...."},
    {"..####..", ".#....#.", ".#....#.", "..####..", ".#....#.", ".#....#.",
     ".#....#.", "..####.."},
    {"..####..", ".#....#.", ".#....#.", "..#####.", "......#.", "......#.",
     ".....#..", "..###..."},
};

void FillMixture(int row, int cls, int n_classes, const DomainOptions& options,
                 Rng& rng, Matrix& out) {
  std::normal_distribution<double> noise(0.0, Mixture2dStddev(options));
  const Eigen::Vector2d c = Mixture2dCenter(cls, n_classes, options);
  for (int d = 0; d < 2; ++d) {
    out(row, d) = std::clamp(c[d] + noise(rng), -1.0, 1.0);
  }
}

void FillDigit(int row, int cls, const DomainOptions& options, Rng& rng,
               Matrix& out) {
  const double flip = std::clamp(options.digit_flip_prob * (1.0 + options.shift),
                                 0.0, 0.5);
  std::bernoulli_distribution flip_pixel(flip);
  const Eigen::VectorXd glyph = DigitTemplate(cls);
  for (int p = 0; p < kDigitPixels; ++p) {
    out(row, p) = flip_pixel(rng) ? -glyph[p] : glyph[p];
  }
}

void FillTabular(int row, int cls, const DomainOptions& options, Rng& rng,
                 Matrix& out) {
  const double peak =
      std::clamp(options.tabular_peak * (1.0 - options.shift), 0.0, 1.0);
  int offset = 0;
  for (size_t f = 0; f < kTabularFieldSizes.size(); ++f) {
    const int k = kTabularFieldSizes[f];
    const int preferred = (cls * static_cast<int>(f + 1) + static_cast<int>(f)) % k;
    std::vector<double> weights(k, (1.0 - peak) / (k - 1));
    weights[preferred] = peak;
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    const int v = pick(rng);
    for (int j = 0; j < k; ++j) out(row, offset + j) = j == v ? 1.0 : 0.0;
    offset += k;
  }
}

}  // namespace

int DomainWidth(Domain domain) {
  switch (domain) {
    case Domain::kMixture2d:
      return 2;
    case Domain::kDigitLike:
      return kDigitPixels;
    case Domain::kTabularOneHot:
      return std::accumulate(kTabularFieldSizes.begin(),
                             kTabularFieldSizes.end(), 0);
  }
  return 0;
}

Eigen::Vector2d Mixture2dCenter(int cls, int n_classes,
                                const DomainOptions& options) {
  const double angle = std::numbers::pi / 4.0 +
                       2.0 * std::numbers::pi * cls / n_classes + options.shift;
  return {options.mixture_radius * std::cos(angle),
          options.mixture_radius * std::sin(angle)};
}

double Mixture2dStddev(const DomainOptions& options) {
  return options.mixture_stddev * (1.0 + std::abs(options.shift));
}

Eigen::VectorXd DigitTemplate(int cls) {
  Eigen::VectorXd glyph(kDigitPixels);
  for (int r = 0; r < kDigitSide; ++r) {
    for (int c = 0; c < kDigitSide; ++c) {
      glyph[r * kDigitSide + c] = kGlyphs[cls][r][c] == '#' ? 1.0 : -1.0;
    }
  }
  return glyph;
}

absl::StatusOr<LabeledDataset> SynthDomain(Domain domain, int n,
                                           const AttributeSpec& attribute,
                                           const PropertyDistribution& property,
                                           uint64_t seed,
                                           const DomainOptions& options) {
  if (absl::Status s = attribute.Validate(); !s.ok()) return s;
  if (property.size() != attribute.n_classes) {
    return absl::InvalidArgumentError(absl::StrCat(
        "property has ", property.size(), " entries but attribute has ",
        attribute.n_classes, " classes"));
  }
  if (n < attribute.n_classes) {
    return absl::InvalidArgumentError(
        absl::StrCat("need n >= n_classes (", n, " < ", attribute.n_classes, ")"));
  }
  if (domain == Domain::kDigitLike && attribute.n_classes > kNumDigitTemplates) {
    return absl::InvalidArgumentError("digitlike supports at most 10 classes");
  }

  const std::vector<int> counts = LargestRemainderCounts(property, n);
  std::vector<int> labels;
  labels.reserve(n);
  for (int c = 0; c < attribute.n_classes; ++c) {
    labels.insert(labels.end(), counts[c], c);
  }
  Rng rng(DeriveSeed(seed, "synth_domain"));
  std::shuffle(labels.begin(), labels.end(), rng);

  LabeledDataset out;
  out.domain = domain;
  out.attribute = attribute;
  out.samples.resize(n, DomainWidth(domain));
  out.labels = labels;
  out.ids.resize(n);
  std::iota(out.ids.begin(), out.ids.end(), 0);
  for (int i = 0; i < n; ++i) {
    switch (domain) {
      case Domain::kMixture2d:
        FillMixture(i, labels[i], attribute.n_classes, options, rng, out.samples);
        break;
      case Domain::kDigitLike:
        FillDigit(i, labels[i], options, rng, out.samples);
        break;
      case Domain::kTabularOneHot:
        FillTabular(i, labels[i], options, rng, out.samples);
        break;
    }
  }
  return out;
}

}  // namespace ganprop::data
