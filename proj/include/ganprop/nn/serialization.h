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

#ifndef GANPROP_NN_SERIALIZATION_H_
#define GANPROP_NN_SERIALIZATION_H_

#include <filesystem>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/nn/network.h"
#include "ganprop/nn/optimizer.h"
#include "json.hpp"

namespace ganprop::nn {

inline constexpr int kWeightFormatVersion = 1;

// Weight document layout:
//   {"format_version": 1,
//    "spec": {"layer_widths": [...], "activations": [{"kind":..,"slope":..}],
//             "seed": <uint64>},
//    "layers": [{"fan_in": i, "fan_out": o,
//                "weight": [row-major fan_in x fan_out], "bias": [...]}]}
// Doubles are written in shortest round-trip form, so load(save(w)) == w
// bit for bit.
nlohmann::json SpecToJson(const DenseNetworkSpec& spec);
absl::StatusOr<DenseNetworkSpec> SpecFromJson(const nlohmann::json& j);

nlohmann::json NetworkToJson(const DenseNetwork& network);
absl::StatusOr<DenseNetwork> NetworkFromJson(const nlohmann::json& j);

nlohmann::json OptimizerToJson(const OptimizerConfig& config);
absl::StatusOr<OptimizerConfig> OptimizerFromJson(const nlohmann::json& j);

absl::Status SaveNetwork(const DenseNetwork& network,
                         const std::filesystem::path& path);
absl::StatusOr<DenseNetwork> LoadNetwork(const std::filesystem::path& path);

// Small file helpers shared by the persistence code across modules.
absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view contents);
absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path);
absl::StatusOr<nlohmann::json> ReadJsonFile(const std::filesystem::path& path);

}  // namespace ganprop::nn

#endif  // GANPROP_NN_SERIALIZATION_H_
