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


// Temporary directories and files for tests that go through the filesystem.

#ifndef ANTIDOTE_TESTS_COMMON_SCRATCH_DIR_H_
#define ANTIDOTE_TESTS_COMMON_SCRATCH_DIR_H_

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "antidote/error.h"

namespace antidote::testing {

// A fresh directory under the system temp path, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& prefix) {
    std::random_device entropy;
    std::filesystem::path base = std::filesystem::temp_directory_path();
    do {
      path_ = base / (prefix + "-" + std::to_string(entropy()));
    } while (!std::filesystem::create_directories(path_));
  }
  ~ScratchDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
}

}  // namespace antidote::testing

#endif  // ANTIDOTE_TESTS_COMMON_SCRATCH_DIR_H_
