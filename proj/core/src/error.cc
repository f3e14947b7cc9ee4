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

#include "antidote/error.h"

namespace antidote {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
      return "parse error";
    case ErrorCode::kValidation:
      return "validation error";
    case ErrorCode::kLookup:
      return "lookup error";
    case ErrorCode::kIo:
      return "I/O error";
    case ErrorCode::kArgument:
      return "argument error";
    case ErrorCode::kConfig:
      return "config error";
    case ErrorCode::kNumerical:
      return "numerical error";
  }
  return "error";
}

int ExitStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kArgument:
      return 2;
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
    case ErrorCode::kLookup:
    case ErrorCode::kIo:
      return 3;
    case ErrorCode::kNumerical:
      return 4;
  }
  return 1;
}

}  // namespace antidote
