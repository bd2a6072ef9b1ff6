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

#ifndef GANPROP_HARNESS_JOB_POOL_H_
#define GANPROP_HARNESS_JOB_POOL_H_

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include "absl/status/statusor.h"

namespace ganprop::harness {

// Runs job(0..n-1) on up to `threads` workers and returns the results in
// index order. Jobs must be independent; each derives its own seeds from its
// index, so the merged output does not depend on scheduling.
template <typename T>
std::vector<absl::StatusOr<T>> RunJobs(
    int n, int threads, const std::function<absl::StatusOr<T>(int)>& job) {
  std::vector<absl::StatusOr<T>> results(
      n, absl::StatusOr<T>(absl::UnknownError("job not run")));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) results[i] = job(i);
  };
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace ganprop::harness

#endif  // GANPROP_HARNESS_JOB_POOL_H_
