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

#ifndef GANPROP_HARNESS_RESULTS_H_
#define GANPROP_HARNESS_RESULTS_H_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ganprop::harness {

// One attack outcome. Binary properties are stored as the class-1
// proportion; multi-class ones as the full probability vector.
struct ResultRow {
  std::string task;
  std::string mode;
  std::string target_id;
  std::vector<double> p_real;
  std::vector<double> p_infer;
  double abs_diff = 0.0;
  int query_count = 0;
  int trial = 0;
  uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr char kResultHeader[] =
    "task,mode,target_id,p_real,p_infer,abs_diff,query_count,trial,seed";

// Append-only sink shared by concurrent jobs. Rows are kept in append order;
// callers that need a deterministic file append in a deterministic order.
class ResultTable {
 public:
  ResultTable() = default;
  ResultTable(const ResultTable&) = delete;
  ResultTable& operator=(const ResultTable&) = delete;

  absl::Status Append(ResultRow row);
  std::vector<ResultRow> rows() const;
  bool closed() const;

  std::string ToCsv() const;
  // Writes `path` and `path`.sha256 (hex digest, two spaces, file name), then
  // rejects further appends.
  absl::Status Close(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  std::vector<ResultRow> rows_;
  bool closed_ = false;
};

std::string ResultCsv(std::span<const ResultRow> rows);
absl::StatusOr<std::vector<ResultRow>> ParseResultCsv(std::string_view text);
absl::StatusOr<std::vector<ResultRow>> ReadResultCsv(
    const std::filesystem::path& path);

// Lowercase hex SHA-256 of `bytes`.
std::string Sha256Hex(std::string_view bytes);

struct SummaryRow {
  std::string task;
  std::string mode;
  // ';'-joined p_real, as written in the table.
  std::string p_real;
  int query_count = 0;
  int n = 0;
  // Statistics of the summarized value: p_infer for binary rows, abs_diff
  // for multi-class rows.
  double mean = 0.0;
  // Population variance.
  double variance = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double mean_abs_diff = 0.0;
  // mean - p_real for binary rows (distance from the y = x benchmark line),
  // mean_abs_diff otherwise.
  double deviation = 0.0;
};

// Linear-interpolation quantile of ascending `sorted` (the "type 7" rule).
double Quantile(std::span<const double> sorted, double q);

// Groups by (task, mode, p_real, query_count) in first-appearance order.
absl::StatusOr<std::vector<SummaryRow>> Summarize(std::span<const ResultRow> rows);
std::string SummaryCsv(std::span<const SummaryRow> rows);

}  // namespace ganprop::harness

#endif  // GANPROP_HARNESS_RESULTS_H_
