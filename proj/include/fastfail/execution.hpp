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

#ifndef FASTFAIL_EXECUTION_HPP_
#define FASTFAIL_EXECUTION_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastfail/common.hpp"
#include "fastfail/mapper.hpp"
#include "fastfail/selection.hpp"

namespace fastfail {

enum class TestStatus { kPass, kFail, kError, kSkip };
enum class Overall { kGreen, kRed };

std::string_view to_string(TestStatus s);
TestStatus test_status_from_string(std::string_view s);
std::string_view to_string(Overall o);

/// 0 -> Pass, 1 -> Fail, anything else -> Error.
TestStatus status_for_exit_code(int code);

struct TestResult {
  std::string suite_id;
  TestStatus status = TestStatus::kError;
  double duration_seconds = 0;
  std::string log_excerpt;
  int attempt = 1;
  std::string note;  // warnings such as "passed on retry"

  bool operator==(const TestResult&) const = default;
};

struct RunReport {
  std::vector<TestResult> results;
  Timestamp started{};
  Timestamp finished{};
  Overall overall = Overall::kGreen;
};

Overall overall_of(const std::vector<TestResult>& results);

/// What the runner is asked to do. `commit` and `suite_id` are exported to
/// child processes as FASTFAIL_COMMIT / FASTFAIL_SUITE; in-process fakes read
/// them directly.
struct RunRequest {
  std::string suite_id;
  std::vector<std::string> argv;
  std::filesystem::path workdir;
  double timeout_seconds = 600;
  std::string commit;
  std::vector<std::pair<std::string, std::string>> env;
};

struct RunOutcome {
  bool spawned = true;
  bool timed_out = false;
  int exit_code = 0;
  std::string output;
  std::string error;
};

/// Runner contract: spawn a command, capture its output, enforce a timeout.
class Runner {
 public:
  virtual ~Runner() = default;
  virtual RunOutcome run(const RunRequest& request) = 0;
};

class ProcessRunner final : public Runner {
 public:
  RunOutcome run(const RunRequest& request) override;
};

/// In-process runner backed by a callable. Must be thread-safe when used
/// with max_parallel > 1.
class FunctionRunner final : public Runner {
 public:
  using Fn = std::function<RunOutcome(const RunRequest&)>;
  explicit FunctionRunner(Fn fn) : fn_(std::move(fn)) {}
  RunOutcome run(const RunRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

struct SuiteRunSettings {
  std::filesystem::path workdir;
  double timeout_seconds = 600;
  std::string commit;
  std::vector<std::string> extra_args;
  std::size_t log_lines = 50;
};

/// Never throws for command failures; those become Error results.
TestResult run_suite(const TestSuiteRecord& suite, const SuiteRunSettings& settings,
                     Runner& runner, const Clock& clock);

struct ExecutionConfig {
  std::size_t max_parallel = 1;
  bool retry_flaky = false;
  double timeout_seconds = 600;
  std::filesystem::path workdir;
  std::string commit;
  std::optional<std::filesystem::path> log_dir;  // writes <log_dir>/<suite>.log
  std::size_t log_lines = 50;
};

/// Runs explicit entries (suite ids or `suite::case`). Unknown entries are
/// a kConfig error raised before anything executes.
RunReport run_entries(const std::vector<std::string>& entries, const MapperDatabase& db,
                      const ExecutionConfig& config, Runner& runner, const Clock& clock);

RunReport run_selection(const SelectionResult& selection, const MapperDatabase& db,
                        const ExecutionConfig& config, Runner& runner, const Clock& clock);

/// Runs `coverage_command` (with `{coverage_out}` replaced by the output
/// path, also exported as FASTFAIL_COVERAGE_OUT) and parses the result.
/// Missing or unparseable output is an error naming the path.
CoverageRecord collect_coverage(const TestSuiteRecord& suite,
                                const std::vector<std::string>& coverage_command,
                                Runner& runner, const std::filesystem::path& workdir,
                                const std::filesystem::path& coverage_output,
                                const std::string& run_id);

std::string run_report_json(const RunReport& report);

/// Log file name for a suite id (path separators replaced).
std::string log_file_name(std::string_view suite_id);

}  // namespace fastfail

#endif  // FASTFAIL_EXECUTION_HPP_
