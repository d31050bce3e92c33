// Copyright 2026 The fastfail Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FASTFAIL_PROCESS_HPP_
#define FASTFAIL_PROCESS_HPP_

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fastfail {

struct ProcessRequest {
  std::vector<std::string> argv;
  std::filesystem::path workdir;  // empty: inherit
  std::chrono::milliseconds timeout{0};  // zero: no limit
  std::vector<std::pair<std::string, std::string>> env;  // added to inherited
};

struct ProcessOutcome {
  bool spawned = false;
  bool timed_out = false;
  int exit_code = -1;   // valid when exited normally
  int term_signal = 0;  // nonzero when killed by a signal
  std::string output;   // merged stdout+stderr, tail-truncated
  std::string error;    // spawn failure description
};

/// Spawns argv[0] (PATH lookup) in its own process group. On timeout the
/// whole group is killed.
ProcessOutcome run_process(const ProcessRequest& request);

std::string shell_quote(std::string_view arg);

}  // namespace fastfail

#endif  // FASTFAIL_PROCESS_HPP_
