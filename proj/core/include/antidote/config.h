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

#ifndef ANTIDOTE_CONFIG_H_
#define ANTIDOTE_CONFIG_H_

#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace antidote {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Parses a nested key-value document:
//
//   # comment
//   [factorization]
//   rank = 8
//   reg = 10
//
// Keys inside a section are returned as "section.key"; keys may also be
// written fully qualified before any section header. Later assignments of
// the same key win. Throws kConfig on malformed lines.
KeyValues ParseKeyValues(std::istream& in);

// Writes `values` back in the sectioned form accepted by ParseKeyValues.
// Keys must be "section.key"; sections appear in first-use order.
std::string FormatKeyValues(const KeyValues& values);

// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double value);

}  // namespace antidote

#endif  // ANTIDOTE_CONFIG_H_
