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

#ifndef GANPROP_DATA_SYNTH_H_
#define GANPROP_DATA_SYNTH_H_

#include <array>
#include <cstdint>

#include "absl/status/statusor.h"
#include "ganprop/data/dataset.h"

namespace ganprop::data {

// Per-domain generation knobs. `shift` perturbs the class-conditional
// distributions (rotated blob centers and inflated noise for mixture2d, more
// pixel noise for digitlike, flattened field preferences for tabular_onehot);
// 0 is the reference distribution.
struct DomainOptions {
  double mixture_radius = 0.55;
  double mixture_stddev = 0.15;
  double digit_flip_prob = 0.08;
  double tabular_peak = 0.55;
  double shift = 0.0;
};

inline constexpr int kDigitSide = 8;
inline constexpr int kDigitPixels = kDigitSide * kDigitSide;
inline constexpr int kNumDigitTemplates = 10;
inline constexpr std::array<int, 5> kTabularFieldSizes = {4, 3, 5, 2, 6};

int DomainWidth(Domain domain);

// Blob center of class `cls` among `n_classes` for mixture2d.
Eigen::Vector2d Mixture2dCenter(int cls, int n_classes,
                                const DomainOptions& options = {});
double Mixture2dStddev(const DomainOptions& options = {});

// The noiseless +/-1 glyph for digit class `cls`.
Eigen::VectorXd DigitTemplate(int cls);

// Synthesizes n samples whose class counts realize `property` by
// largest-remainder rounding. Rows are shuffled; ids are 0..n-1.
absl::StatusOr<LabeledDataset> SynthDomain(Domain domain, int n,
                                           const AttributeSpec& attribute,
                                           const PropertyDistribution& property,
                                           uint64_t seed,
                                           const DomainOptions& options = {});

}  // namespace ganprop::data

#endif  // GANPROP_DATA_SYNTH_H_
