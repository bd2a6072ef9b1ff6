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

#include "ganprop/data/dataset_io.h"

#include <charconv>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ganprop/nn/serialization.h"
#include "json.hpp"

namespace ganprop::data {

using nlohmann::json;

std::filesystem::path SidecarPath(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  return p.replace_extension(".json");
}

absl::Status WriteDataset(const LabeledDataset& dataset,
                          const std::filesystem::path& csv_path) {
  std::ostringstream csv;
  for (int d = 0; d < dataset.width(); ++d) csv << 'f' << d << ',';
  csv << "label\n";
  char buf[32];
  for (int r = 0; r < dataset.size(); ++r) {
    for (int d = 0; d < dataset.width(); ++d) {
      auto res = std::to_chars(buf, buf + sizeof(buf), dataset.samples(r, d));
      csv.write(buf, res.ptr - buf);
      csv << ',';
    }
    csv << dataset.labels[r] << '\n';
  }
  if (absl::Status s = nn::WriteTextFile(csv_path, csv.str()); !s.ok()) return s;

  json sidecar = {
      {"domain", DomainName(dataset.domain)},
      {"attribute",
       {{"n_classes", dataset.attribute.n_classes},
        {"class_names", dataset.attribute.class_names}}},
      {"empirical_property", dataset.EmpiricalProperty().probs()},
      {"class_counts", dataset.ClassCounts()},
      {"ids", dataset.ids}};
  return nn::WriteTextFile(SidecarPath(csv_path), sidecar.dump(1) + "\n");
}

absl::StatusOr<LabeledDataset> ReadDataset(
    const std::filesystem::path& csv_path) {
  absl::StatusOr<json> sidecar = nn::ReadJsonFile(SidecarPath(csv_path));
  if (!sidecar.ok()) return sidecar.status();
  absl::StatusOr<std::string> text = nn::ReadTextFile(csv_path);
  if (!text.ok()) return text.status();

  LabeledDataset out;
  try {
    absl::StatusOr<Domain> domain =
        ParseDomain((*sidecar).at("domain").get<std::string>());
    if (!domain.ok()) return domain.status();
    out.domain = *domain;
    out.attribute.n_classes = (*sidecar).at("attribute").at("n_classes").get<int>();
    out.attribute.class_names = (*sidecar)
                                    .at("attribute")
                                    .at("class_names")
                                    .get<std::vector<std::string>>();
    out.ids = (*sidecar).at("ids").get<std::vector<int64_t>>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed dataset sidecar: ", e.what()));
  }
  if (absl::Status s = out.attribute.Validate(); !s.ok()) return s;

  std::vector<absl::string_view> lines =
      absl::StrSplit(*text, '\n', absl::SkipEmpty());
  if (lines.empty()) return absl::InvalidArgumentError("empty dataset CSV");
  const std::vector<absl::string_view> header = absl::StrSplit(lines[0], ',');
  if (header.empty() || header.back() != "label") {
    return absl::InvalidArgumentError("dataset CSV must end with a label column");
  }
  const int width = static_cast<int>(header.size()) - 1;
  const int rows = static_cast<int>(lines.size()) - 1;
  out.samples.resize(rows, width);
  out.labels.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const std::vector<absl::string_view> cells = absl::StrSplit(lines[r + 1], ',');
    if (static_cast<int>(cells.size()) != width + 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r + 1, " has ", cells.size(), " cells, expected ",
                       width + 1));
    }
    for (int d = 0; d <= width; ++d) {
      const absl::string_view cell = cells[d];
      if (d < width) {
        double v = 0.0;
        auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc()) {
          return absl::InvalidArgumentError(
              absl::StrCat("bad number at row ", r + 1, " column ", d));
        }
        out.samples(r, d) = v;
      } else {
        int label = -1;
        auto res = std::from_chars(cell.data(), cell.data() + cell.size(), label);
        if (res.ec != std::errc() || label < 0 ||
            label >= out.attribute.n_classes) {
          return absl::InvalidArgumentError(
              absl::StrCat("bad label at row ", r + 1));
        }
        out.labels[r] = label;
      }
    }
  }
  if (static_cast<int>(out.ids.size()) != rows) {
    return absl::InvalidArgumentError("sidecar id count does not match CSV rows");
  }
  return out;
}

}  // namespace ganprop::data
