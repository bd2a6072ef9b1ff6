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

#include "ganprop/harness/results.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "ganprop/harness/config.h"
#include "ganprop/nn/serialization.h"
#include "openssl/evp.h"

namespace ganprop::harness {
namespace {

std::string JoinValues(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(FormatDouble(x));
  return absl::StrJoin(parts, ";");
}

absl::StatusOr<std::vector<double>> SplitValues(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part :
       std::vector<std::string>(absl::StrSplit(text, ';'))) {
    double v;
    if (!absl::SimpleAtod(part, &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad number '", part, "'"));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

absl::Status ResultTable::Append(ResultRow row) {
  std::lock_guard<std::mutex> lock(mu_);
  if (closed_) return absl::FailedPreconditionError("result table is closed");
  rows_.push_back(std::move(row));
  return absl::OkStatus();
}

std::vector<ResultRow> ResultTable::rows() const {
  std::lock_guard<std::mutex> lock(mu_);
  return rows_;
}

bool ResultTable::closed() const {
  std::lock_guard<std::mutex> lock(mu_);
  return closed_;
}

std::string ResultTable::ToCsv() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ResultCsv(rows_);
}

absl::Status ResultTable::Close(const std::filesystem::path& path) {
  std::lock_guard<std::mutex> lock(mu_);
  if (closed_) return absl::FailedPreconditionError("result table already closed");
  const std::string csv = ResultCsv(rows_);
  if (absl::Status s = nn::WriteTextFile(path, csv); !s.ok()) return s;
  std::filesystem::path digest_path = path;
  digest_path += ".sha256";
  if (absl::Status s = nn::WriteTextFile(
          digest_path,
          absl::StrCat(Sha256Hex(csv), "  ", path.filename().string(), "\n"));
      !s.ok()) {
    return s;
  }
  closed_ = true;
  return absl::OkStatus();
}

std::string ResultCsv(std::span<const ResultRow> rows) {
  std::string out = absl::StrCat(kResultHeader, "\n");
  for (const ResultRow& r : rows) {
    absl::StrAppend(&out, r.task, ",", r.mode, ",", r.target_id, ",",
                    JoinValues(r.p_real), ",", JoinValues(r.p_infer), ",",
                    FormatDouble(r.abs_diff), ",", r.query_count, ",", r.trial,
                    ",", r.seed, "\n");
  }
  return out;
}

absl::StatusOr<std::vector<ResultRow>> ParseResultCsv(std::string_view text) {
  std::vector<ResultRow> rows;
  int line_no = 0;
  const std::vector<std::string> lines =
      absl::StrSplit(std::string(text), '\n', absl::SkipEmpty());
  for (const std::string& line : lines) {
    ++line_no;
    if (line_no == 1) {
      if (line != kResultHeader) {
        return absl::InvalidArgumentError("unexpected result table header");
      }
      continue;
    }
    const std::vector<std::string> f = absl::StrSplit(line, ',');
    if (f.size() != 9) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected 9 fields, got ", f.size()));
    }
    ResultRow r;
    r.task = f[0];
    r.mode = f[1];
    r.target_id = f[2];
    absl::StatusOr<std::vector<double>> real = SplitValues(f[3]);
    absl::StatusOr<std::vector<double>> infer = SplitValues(f[4]);
    if (!real.ok() || !infer.ok() || !absl::SimpleAtod(f[5], &r.abs_diff) ||
        !absl::SimpleAtoi(f[6], &r.query_count) ||
        !absl::SimpleAtoi(f[7], &r.trial) || !absl::SimpleAtoi(f[8], &r.seed)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": malformed row"));
    }
    r.p_real = *std::move(real);
    r.p_infer = *std::move(infer);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) return absl::InvalidArgumentError("empty result table");
  return rows;
}

absl::StatusOr<std::vector<ResultRow>> ReadResultCsv(
    const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = nn::ReadTextFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<std::vector<ResultRow>> rows = ParseResultCsv(*text);
  if (!rows.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), ": ", rows.status().message()));
  }
  return rows;
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

double Quantile(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

absl::StatusOr<std::vector<SummaryRow>> Summarize(std::span<const ResultRow> rows) {
  if (rows.empty()) return absl::InvalidArgumentError("no rows to summarize");
  struct Group {
    SummaryRow head;
    std::vector<double> values;
    std::vector<double> diffs;
    bool binary = true;
    double real = 0.0;
  };
  std::vector<Group> groups;
  std::map<std::tuple<std::string, std::string, std::string, int>, size_t> index;
  for (const ResultRow& r : rows) {
    const bool binary = r.p_real.size() == 1 && r.p_infer.size() == 1;
    const std::string real = JoinValues(r.p_real);
    auto key = std::make_tuple(r.task, r.mode, real, r.query_count);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) {
      Group g;
      g.head.task = r.task;
      g.head.mode = r.mode;
      g.head.p_real = real;
      g.head.query_count = r.query_count;
      g.binary = binary;
      g.real = binary ? r.p_real[0] : 0.0;
      groups.push_back(std::move(g));
    }
    Group& g = groups[it->second];
    if (g.binary != binary) {
      return absl::InvalidArgumentError(absl::StrCat(
          "group ", r.task, "/", r.mode, "/", real, " mixes binary and multi-class rows"));
    }
    g.values.push_back(binary ? r.p_infer[0] : r.abs_diff);
    g.diffs.push_back(r.abs_diff);
  }
  std::vector<SummaryRow> out;
  for (Group& g : groups) {
    if (g.values.empty()) return absl::InvalidArgumentError("empty group");
    SummaryRow s = g.head;
    const double n = static_cast<double>(g.values.size());
    s.n = static_cast<int>(g.values.size());
    double sum = 0.0, diff_sum = 0.0;
    for (double v : g.values) sum += v;
    for (double d : g.diffs) diff_sum += d;
    s.mean = sum / n;
    s.mean_abs_diff = diff_sum / n;
    double ss = 0.0;
    for (double v : g.values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / n;
    std::sort(g.values.begin(), g.values.end());
    s.q1 = Quantile(g.values, 0.25);
    s.median = Quantile(g.values, 0.5);
    s.q3 = Quantile(g.values, 0.75);
    s.deviation = g.binary ? s.mean - g.real : s.mean_abs_diff;
    out.push_back(std::move(s));
  }
  return out;
}

std::string SummaryCsv(std::span<const SummaryRow> rows) {
  std::string out =
      "task,mode,p_real,query_count,n,mean,variance,q1,median,q3,mean_abs_diff,"
      "deviation\n";
  for (const SummaryRow& s : rows) {
    absl::StrAppend(&out, s.task, ",", s.mode, ",", s.p_real, ",", s.query_count,
                    ",", s.n, ",", FormatDouble(s.mean), ",",
                    FormatDouble(s.variance), ",", FormatDouble(s.q1), ",",
                    FormatDouble(s.median), ",", FormatDouble(s.q3), ",",
                    FormatDouble(s.mean_abs_diff), ",", FormatDouble(s.deviation),
                    "\n");
  }
  return out;
}

}  // namespace ganprop::harness
