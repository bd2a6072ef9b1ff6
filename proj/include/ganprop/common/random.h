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

#ifndef GANPROP_COMMON_RANDOM_H_
#define GANPROP_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace ganprop {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a parent seed, a stage label and an
// index. Distinct (stage, index) pairs under one parent map to distinct seeds
// with overwhelming probability; equal inputs always map to equal seeds.
uint64_t DeriveSeed(uint64_t parent, std::string_view stage, uint64_t index = 0);

inline Rng MakeRng(uint64_t seed) { return Rng(seed); }

}  // namespace ganprop

#endif  // GANPROP_COMMON_RANDOM_H_
