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

#include "fastfail/execution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "fastfail/coverage.hpp"
#include "fastfail/error.hpp"
#include "fastfail/process.hpp"
#include "json.hpp"

namespace fastfail {

std::string_view to_string(TestStatus s) {
  switch (s) {
    case TestStatus::kPass: return "pass";
    case TestStatus::kFail: return "fail";
    case TestStatus::kError: return "error";
    case TestStatus::kSkip: return "skip";
  }
  return "error";
}

TestStatus test_status_from_string(std::string_view s) {
  if (s == "pass") return TestStatus::kPass;
  if (s == "fail") return TestStatus::kFail;
  if (s == "error") return TestStatus::kError;
  if (s == "skip") return TestStatus::kSkip;
  throw Error(ErrorKind::kParse, "unknown test status '" + std::string(s) + "'");
}

std::string_view to_string(Overall o) { return o == Overall::kGreen ? "green" : "red"; }

TestStatus status_for_exit_code(int code) {
  if (code == 0) return TestStatus::kPass;
  if (code == 1) return TestStatus::kFail;
  return TestStatus::kError;
}

Overall overall_of(const std::vector<TestResult>& results) {
  const bool green = std::all_of(results.begin(), results.end(), [](const TestResult& r) {
    return r.status == TestStatus::kPass || r.status == TestStatus::kSkip;
  });
  return green ? Overall::kGreen : Overall::kRed;
}

RunOutcome ProcessRunner::run(const RunRequest& request) {
  ProcessRequest req;
  req.argv = request.argv;
  req.workdir = request.workdir;
  req.timeout = std::chrono::milliseconds(
      static_cast<long long>(std::ceil(request.timeout_seconds * 1000.0)));
  req.env = request.env;
  req.env.emplace_back("FASTFAIL_SUITE", request.suite_id);
  if (!request.commit.empty()) req.env.emplace_back("FASTFAIL_COMMIT", request.commit);
  ProcessOutcome p = run_process(req);
  RunOutcome out;
  out.spawned = p.spawned;
  out.timed_out = p.timed_out;
  out.exit_code = p.term_signal != 0 ? 128 + p.term_signal : p.exit_code;
  out.output = std::move(p.output);
  out.error = std::move(p.error);
  return out;
}

namespace {

std::string tail_lines(const std::string& text, std::size_t n) {
  if (n == 0) return {};
  std::size_t pos = text.size();
  if (pos > 0 && text[pos - 1] == '\n') --pos;
  std::size_t count = 0;
  while (pos > 0) {
    const auto nl = text.rfind('\n', pos - 1);
    if (nl == std::string::npos) return text;
    if (++count == n) return text.substr(nl + 1);
    pos = nl;
  }
  return text;
}

double seconds_between(std::chrono::system_clock::time_point a,
                       std::chrono::system_clock::time_point b) {
  return std::max(0.0, std::chrono::duration<double>(b - a).count());
}

}  // namespace

TestResult run_suite(const TestSuiteRecord& suite, const SuiteRunSettings& settings,
                     Runner& runner, const Clock& clock) {
  TestResult result;
  result.suite_id = suite.id;
  RunRequest req;
  req.suite_id = suite.id;
  req.argv = suite.command;
  req.argv.insert(req.argv.end(), settings.extra_args.begin(), settings.extra_args.end());
  req.workdir = settings.workdir;
  req.timeout_seconds = settings.timeout_seconds;
  req.commit = settings.commit;

  const auto start = clock.now();
  RunOutcome out;
  try {
    out = runner.run(req);
  } catch (const std::exception& e) {
    out.spawned = false;
    out.error = e.what();
  }
  result.duration_seconds = seconds_between(start, clock.now());

  if (!out.spawned) {
    result.status = TestStatus::kError;
    result.log_excerpt = "[fastfail] spawn failed: " + out.error;
    return result;
  }
  result.log_excerpt = tail_lines(out.output, settings.log_lines);
  if (out.timed_out) {
    result.status = TestStatus::kError;
    if (!result.log_excerpt.empty() && result.log_excerpt.back() != '\n') result.log_excerpt += '\n';
    char buf[96];
    std::snprintf(buf, sizeof buf, "[fastfail] timed out after %.3g s", settings.timeout_seconds);
    result.log_excerpt += buf;
    result.note = "timeout";
    return result;
  }
  result.status = status_for_exit_code(out.exit_code);
  return result;
}

namespace {

struct ResolvedEntry {
  std::string entry;
  const TestSuiteRecord* suite = nullptr;
  std::string case_id;
};

ResolvedEntry resolve(const std::string& entry, const MapperDatabase& db) {
  if (const TestSuiteRecord* s = db.find_suite(entry)) return {entry, s, {}};
  auto [suite_id, case_id] = split_case_ref(entry);
  const TestSuiteRecord* s = db.find_suite(suite_id);
  if (s == nullptr || case_id.empty() ||
      std::find(s->case_ids.begin(), s->case_ids.end(), case_id) == s->case_ids.end()) {
    throw Error(ErrorKind::kConfig, "selected suite '" + entry + "' is not in the mapper database");
  }
  return {entry, s, case_id};
}

}  // namespace

std::string log_file_name(std::string_view suite_id) {
  std::string name(suite_id);
  for (char& c : name) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return name + ".log";
}

RunReport run_entries(const std::vector<std::string>& entries, const MapperDatabase& db,
                      const ExecutionConfig& config, Runner& runner, const Clock& clock) {
  std::set<std::string> unique(entries.begin(), entries.end());
  std::vector<ResolvedEntry> work;
  for (const auto& e : unique) work.push_back(resolve(e, db));

  RunReport report;
  report.started = clock.now_seconds();
  std::vector<TestResult> results(work.size());
  std::vector<std::string> logs(work.size());

  auto execute = [&](std::size_t i) {
    const ResolvedEntry& w = work[i];
    SuiteRunSettings settings;
    settings.workdir = config.workdir;
    settings.timeout_seconds = config.timeout_seconds;
    settings.commit = config.commit;
    settings.log_lines = config.log_lines;
    if (!w.case_id.empty()) settings.extra_args.push_back(w.case_id);
    TestResult r = run_suite(*w.suite, settings, runner, clock);
    if (r.status == TestStatus::kFail && config.retry_flaky) {
      TestResult again = run_suite(*w.suite, settings, runner, clock);
      again.attempt = 2;
      again.duration_seconds += r.duration_seconds;
      if (again.status == TestStatus::kPass) again.note = "flaky: failed once, passed on retry";
      r = std::move(again);
    }
    r.suite_id = w.entry;
    results[i] = std::move(r);
  };

  const std::size_t workers = std::min(std::max<std::size_t>(1, config.max_parallel), work.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < work.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) execute(i);
      });
    }
  }

  std::sort(results.begin(), results.end(),
            [](const TestResult& a, const TestResult& b) { return a.suite_id < b.suite_id; });
  if (config.log_dir) {
    for (const auto& r : results) {
      write_file_atomic(*config.log_dir / log_file_name(r.suite_id), r.log_excerpt);
    }
  }
  report.results = std::move(results);
  report.finished = clock.now_seconds();
  report.overall = overall_of(report.results);
  return report;
}

RunReport run_selection(const SelectionResult& selection, const MapperDatabase& db,
                        const ExecutionConfig& config, Runner& runner, const Clock& clock) {
  std::vector<std::string> entries = selection.selected_functional;
  entries.insert(entries.end(), selection.selected_unit.begin(), selection.selected_unit.end());
  return run_entries(entries, db, config, runner, clock);
}

CoverageRecord collect_coverage(const TestSuiteRecord& suite,
                                const std::vector<std::string>& coverage_command,
                                Runner& runner, const std::filesystem::path& workdir,
                                const std::filesystem::path& coverage_output,
                                const std::string& run_id) {
  RunRequest req;
  req.suite_id = suite.id;
  req.workdir = workdir;
  for (std::string arg : coverage_command) {
    for (std::size_t pos; (pos = arg.find("{coverage_out}")) != std::string::npos;) {
      arg.replace(pos, 14, coverage_output.string());
    }
    req.argv.push_back(std::move(arg));
  }
  req.env.emplace_back("FASTFAIL_COVERAGE_OUT", coverage_output.string());
  const RunOutcome out = runner.run(req);
  if (!out.spawned) {
    throw Error(ErrorKind::kIo, "coverage run for '" + suite.id + "' did not start: " + out.error);
  }
  std::error_code ec;
  if (!std::filesystem::is_regular_file(coverage_output, ec)) {
    throw Error(ErrorKind::kIo, "coverage output '" + coverage_output.string() + "' missing");
  }
  const std::string text = read_file(coverage_output);
  try {
    if (coverage_output.extension() == ".xml") {
      return parse_cobertura(text, suite.id, run_id);
    }
    auto records = parse_coverage_text(text, run_id);
    CoverageRecord merged{suite.id, {}, run_id, {}};
    for (auto& r : records) {
      for (auto& f : r.covered) merged.covered.push_back(std::move(f));
    }
    return merged;
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse,
                "coverage output '" + coverage_output.string() + "': " + e.what());
  }
}

std::string run_report_json(const RunReport& report) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json item = {{"suite", r.suite_id},
                           {"status", to_string(r.status)},
                           {"duration_s", r.duration_seconds},
                           {"attempt", r.attempt},
                           {"log_excerpt", r.log_excerpt}};
    if (!r.note.empty()) item["note"] = r.note;
    results.push_back(std::move(item));
  }
  nlohmann::json doc = {{"results", std::move(results)},
                        {"started", format_rfc3339(report.started)},
                        {"finished", format_rfc3339(report.finished)},
                        {"overall", to_string(report.overall)}};
  return doc.dump(2) + "\n";
}

}  // namespace fastfail
