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

#ifndef ANTIDOTE_ERROR_H_
#define ANTIDOTE_ERROR_H_

#include <stdexcept>
#include <string>

namespace antidote {

enum class ErrorCode {
  kParse,       // malformed input text
  kValidation,  // well-formed input violating an invariant
  kLookup,      // missing key or identifier
  kIo,          // file could not be opened or written
  kArgument,    // bad argument to an operation
  kConfig,      // bad or incompatible configuration
  kNumerical,   // singular system or non-finite value
};

const char* ErrorCodeName(ErrorCode code);

// Process exit status for the command-line tool: 2 config, 3 data, 4 numerical.
int ExitStatusFor(ErrorCode code);

// Every failure raised by the library is an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Same code, message prefixed with `context: `.
  Error WithContext(const std::string& context) const {
    return Error(code_, context + ": " + what());
  }

 private:
  ErrorCode code_;
};

inline Error ParseError(const std::string& m) { return {ErrorCode::kParse, m}; }
inline Error ValidationError(const std::string& m) {
  return {ErrorCode::kValidation, m};
}
inline Error LookupError(const std::string& m) { return {ErrorCode::kLookup, m}; }
inline Error IoError(const std::string& m) { return {ErrorCode::kIo, m}; }
inline Error ArgumentError(const std::string& m) {
  return {ErrorCode::kArgument, m};
}
inline Error ConfigError(const std::string& m) { return {ErrorCode::kConfig, m}; }
inline Error NumericalError(const std::string& m) {
  return {ErrorCode::kNumerical, m};
}

}  // namespace antidote

#endif  // ANTIDOTE_ERROR_H_
