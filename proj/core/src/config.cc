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

#include "antidote/config.h"

#include <charconv>
#include <map>
#include <sstream>

#include "antidote/error.h"

namespace antidote {
namespace {

std::string Trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValues ParseKeyValues(std::istream& in) {
  KeyValues values;
  std::map<std::string, size_t> position;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = Trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ConfigError("malformed section header on config line " +
                          std::to_string(line_no));
      }
      section = Trim(text.substr(1, text.size() - 2));
      continue;
    }
    size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value' on config line " + std::to_string(line_no));
    }
    std::string key = Trim(text.substr(0, eq));
    std::string value = Trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(line_no));
    if (!section.empty()) key = section + "." + key;
    auto [it, inserted] = position.try_emplace(key, values.size());
    if (inserted) {
      values.emplace_back(key, value);
    } else {
      values[it->second].second = value;
    }
  }
  return values;
}

std::string FormatKeyValues(const KeyValues& values) {
  std::vector<std::string> sections;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> grouped;
  for (const auto& [key, value] : values) {
    size_t dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError("config key '" + key + "' has no section");
    std::string section = key.substr(0, dot);
    if (!grouped.count(section)) sections.push_back(section);
    grouped[section].emplace_back(key.substr(dot + 1), value);
  }
  std::ostringstream out;
  for (size_t s = 0; s < sections.size(); ++s) {
    if (s > 0) out << '\n';
    out << '[' << sections[s] << "]\n";
    for (const auto& [key, value] : grouped[sections[s]]) {
      out << key << " = " << value << '\n';
    }
  }
  return out.str();
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ec == std::errc() ? ptr : buffer);
}

}  // namespace antidote
