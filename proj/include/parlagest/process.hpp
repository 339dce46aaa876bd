// Copyright 2026 The parlagest Authors
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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace parlagest {

struct ProcessResult {
  int exit_code = -1;
  std::string stderr_text;
};

/// Runs argv[0] (looked up on PATH) and waits for it. Standard output is
/// discarded; standard error is captured. `env` entries are added to the
/// inherited environment.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& env = {});

/// Resolves an executable name the way execvp would.
std::optional<std::filesystem::path> find_executable(const std::string& name);

/// Scoped temporary directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "parlagest");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace parlagest
