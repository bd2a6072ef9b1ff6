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

#ifndef GANPROP_COMMON_CHECK_H_
#define GANPROP_COMMON_CHECK_H_

#include <cstdio>
#include <cstdlib>

// Fatal invariant check for internal programming errors. Caller-facing input
// validation goes through absl::Status instead.
#define GANPROP_CHECK(cond, msg)                                         \
  do {                                                                   \
    if (!(cond)) {                                                       \
      std::fprintf(stderr, "%s:%d: check failed: %s (%s)\n", __FILE__,   \
                   __LINE__, #cond, msg);                                \
      std::abort();                                                      \
    }                                                                    \
  } while (0)

#endif  // GANPROP_COMMON_CHECK_H_
