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

#ifndef GANPROP_COMMON_STATUS_MACROS_H_
#define GANPROP_COMMON_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define GANPROP_STATUS_CONCAT_INNER_(a, b) a##b
#define GANPROP_STATUS_CONCAT_(a, b) GANPROP_STATUS_CONCAT_INNER_(a, b)

#define GANPROP_RETURN_IF_ERROR(expr)          \
  do {                                         \
    const absl::Status _ganprop_status = (expr); \
    if (!_ganprop_status.ok()) return _ganprop_status; \
  } while (0)

#define GANPROP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                   \
  if (!tmp.ok()) return tmp.status();                   \
  lhs = std::move(tmp).value()

// Usage: GANPROP_ASSIGN_OR_RETURN(auto x, MaybeX());
#define GANPROP_ASSIGN_OR_RETURN(lhs, rexpr) \
  GANPROP_ASSIGN_OR_RETURN_IMPL_(            \
      GANPROP_STATUS_CONCAT_(_ganprop_statusor_, __LINE__), lhs, rexpr)

#endif  // GANPROP_COMMON_STATUS_MACROS_H_
