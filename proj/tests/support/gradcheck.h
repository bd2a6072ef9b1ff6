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

#ifndef GANPROP_TESTS_SUPPORT_GRADCHECK_H_
#define GANPROP_TESTS_SUPPORT_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>

#include "Eigen/Dense"

namespace ganprop::testing {

// Central finite differences of a scalar function of one matrix argument.
inline Eigen::MatrixXd CentralDifference(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& at, double step = 1e-4) {
  Eigen::MatrixXd grad(at.rows(), at.cols());
  Eigen::MatrixXd probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double orig = probe(i);
    probe(i) = orig + step;
    const double up = f(probe);
    probe(i) = orig - step;
    const double down = f(probe);
    probe(i) = orig;
    grad(i) = (up - down) / (2.0 * step);
  }
  return grad;
}

// Largest relative error between two gradients. Magnitudes below `floor` are
// compared on the floor's scale so that vanishing entries do not dominate.
inline double MaxRelativeError(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& b, double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), floor});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

}  // namespace ganprop::testing

#endif  // GANPROP_TESTS_SUPPORT_GRADCHECK_H_
