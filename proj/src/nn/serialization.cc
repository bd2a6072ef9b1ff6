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

#include "ganprop/nn/serialization.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace ganprop::nn {

using nlohmann::json;

json SpecToJson(const DenseNetworkSpec& spec) {
  json acts = json::array();
  for (const Activation& a : spec.activations) {
    acts.push_back({{"kind", ActivationName(a.kind)}, {"slope", a.slope}});
  }
  return {{"layer_widths", spec.layer_widths},
          {"activations", acts},
          {"seed", spec.seed}};
}

absl::StatusOr<DenseNetworkSpec> SpecFromJson(const json& j) {
  DenseNetworkSpec spec;
  try {
    spec.layer_widths = j.at("layer_widths").get<std::vector<int>>();
    for (const json& a : j.at("activations")) {
      absl::StatusOr<ActivationKind> kind =
          ParseActivationKind(a.at("kind").get<std::string>());
      if (!kind.ok()) return kind.status();
      spec.activations.push_back({*kind, a.value("slope", 0.2)});
    }
    spec.seed = j.at("seed").get<uint64_t>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed network spec: ", e.what()));
  }
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  return spec;
}

json NetworkToJson(const DenseNetwork& network) {
  json layers = json::array();
  for (const DenseLayer& layer : network.layers()) {
    std::vector<double> w;
    w.reserve(layer.weight.size());
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index k = 0; k < layer.weight.cols(); ++k) {
        w.push_back(layer.weight(i, k));
      }
    }
    std::vector<double> b(layer.bias.data(),
                          layer.bias.data() + layer.bias.size());
    layers.push_back({{"fan_in", layer.weight.rows()},
                      {"fan_out", layer.weight.cols()},
                      {"weight", w},
                      {"bias", b}});
  }
  return {{"format_version", kWeightFormatVersion},
          {"spec", SpecToJson(network.spec())},
          {"layers", layers}};
}

absl::StatusOr<DenseNetwork> NetworkFromJson(const json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kWeightFormatVersion) {
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported weight format_version ", version));
    }
    absl::StatusOr<DenseNetworkSpec> spec = SpecFromJson(j.at("spec"));
    if (!spec.ok()) return spec.status();
    std::vector<DenseLayer> layers;
    for (const json& jl : j.at("layers")) {
      const int fan_in = jl.at("fan_in").get<int>();
      const int fan_out = jl.at("fan_out").get<int>();
      const std::vector<double> w = jl.at("weight").get<std::vector<double>>();
      const std::vector<double> b = jl.at("bias").get<std::vector<double>>();
      if (static_cast<int>(w.size()) != fan_in * fan_out ||
          static_cast<int>(b.size()) != fan_out) {
        return absl::InvalidArgumentError("weight array length mismatch");
      }
      DenseLayer layer;
      layer.weight.resize(fan_in, fan_out);
      for (int i = 0; i < fan_in; ++i) {
        for (int k = 0; k < fan_out; ++k) layer.weight(i, k) = w[i * fan_out + k];
      }
      layer.bias = Eigen::Map<const Eigen::RowVectorXd>(b.data(), fan_out);
      layers.push_back(std::move(layer));
    }
    return DenseNetwork::FromLayers(*spec, std::move(layers));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed weight document: ", e.what()));
  }
}

json OptimizerToJson(const OptimizerConfig& c) {
  return {{"kind", OptimizerKindName(c.kind)},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"batch_size", c.batch_size}};
}

absl::StatusOr<OptimizerConfig> OptimizerFromJson(const json& j) {
  OptimizerConfig c;
  try {
    absl::StatusOr<OptimizerKind> kind =
        ParseOptimizerKind(j.at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    c.kind = *kind;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed optimizer config: ", e.what()));
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      return absl::UnavailableError(absl::StrCat(
          "cannot create directory ", path.parent_path().string(), ": ",
          ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    return absl::UnavailableError(
        absl::StrCat("cannot open ", path.string(), " for writing"));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::StatusOr<json> ReadJsonFile(const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = ReadTextFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid JSON in ", path.string()));
  }
  return j;
}

absl::Status SaveNetwork(const DenseNetwork& network,
                         const std::filesystem::path& path) {
  return WriteTextFile(path, NetworkToJson(network).dump(1) + "\n");
}

absl::StatusOr<DenseNetwork> LoadNetwork(const std::filesystem::path& path) {
  absl::StatusOr<json> j = ReadJsonFile(path);
  if (!j.ok()) return j.status();
  return NetworkFromJson(*j);
}

}  // namespace ganprop::nn
