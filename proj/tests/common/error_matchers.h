// Copyright 2026 The Antidote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Helpers for asserting on antidote::Error.

#ifndef ANTIDOTE_TESTS_COMMON_ERROR_MATCHERS_H_
#define ANTIDOTE_TESTS_COMMON_ERROR_MATCHERS_H_

#include <optional>
#include <string>

#include "antidote/error.h"

namespace antidote::testing {

// Code and message of the Error thrown by `f`, or nullopt if none was thrown.
struct CaughtError {
  ErrorCode code;
  std::string message;
};

template <typename F>
std::optional<CaughtError> CatchError(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return CaughtError{e.code(), e.what()};
  }
  return std::nullopt;
}

template <typename F>
std::optional<ErrorCode> ErrorCodeOf(F&& f) {
  auto caught = CatchError(f);
  if (!caught) return std::nullopt;
  return caught->code;
}

}  // namespace antidote::testing

#define EXPECT_ANTIDOTE_ERROR(statement, expected_code)                       \
  EXPECT_EQ(::antidote::testing::ErrorCodeOf([&] { (void)(statement); }), \
            std::optional<::antidote::ErrorCode>(expected_code))

#endif  // ANTIDOTE_TESTS_COMMON_ERROR_MATCHERS_H_
