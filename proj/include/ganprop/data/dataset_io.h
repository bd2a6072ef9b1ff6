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

#ifndef GANPROP_DATA_DATASET_IO_H_
#define GANPROP_DATA_DATASET_IO_H_

#include <filesystem>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ganprop/data/dataset.h"

namespace ganprop::data {

// CSV with header "f0,...,f{d-1},label" plus a JSON sidecar next to it (same
// stem, .json extension) holding the domain tag, attribute spec, empirical
// property and sample ids.
absl::Status WriteDataset(const LabeledDataset& dataset,
                          const std::filesystem::path& csv_path);
absl::StatusOr<LabeledDataset> ReadDataset(const std::filesystem::path& csv_path);

std::filesystem::path SidecarPath(const std::filesystem::path& csv_path);

}  // namespace ganprop::data

#endif  // GANPROP_DATA_DATASET_IO_H_
