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

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "fastfail/coverage.hpp"
#include "fastfail/error.hpp"
#include "fastfail/execution.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fastfail {
namespace {

const Timestamp kT0 = from_unix_seconds(1'700'000'000);

TestSuiteRecord sh_suite(const std::string& id, const std::string& script) {
  return {id, SuiteKind::kFunctional, {"/bin/sh", "-c", script}, {}};
}

TestResult run_sh(const std::string& script, double timeout = 10) {
  ProcessRunner runner;
  SystemClock clock;
  SuiteRunSettings s;
  s.timeout_seconds = timeout;
  return run_suite(sh_suite("S", script), s, runner, clock);
}

TEST(Execution, ExitCodeContract) {
  EXPECT_EQ(run_sh("exit 0").status, TestStatus::kPass);
  EXPECT_EQ(run_sh("exit 1").status, TestStatus::kFail);
  EXPECT_EQ(run_sh("exit 2").status, TestStatus::kError);
  EXPECT_EQ(run_sh("exit 77").status, TestStatus::kError);
  EXPECT_EQ(run_sh("kill -KILL $$").status, TestStatus::kError);
  for (int code = 0; code < 300; ++code) {
    EXPECT_EQ(status_for_exit_code(code), status_for_exit_code(code));
  }
  EXPECT_EQ(status_for_exit_code(-1), TestStatus::kError);
}

TEST(Execution, TimeoutIsErrorNearTheLimit) {
  const auto r = run_sh("sleep 20", 1.0);
  EXPECT_EQ(r.status, TestStatus::kError);
  EXPECT_NEAR(r.duration_seconds, 1.0, 1.0);
  EXPECT_NE(r.log_excerpt.find("timed out"), std::string::npos);
  EXPECT_EQ(r.note, "timeout");
}

TEST(Execution, SpawnFailureIsAnErrorResult) {
  ProcessRunner runner;
  SystemClock clock;
  TestSuiteRecord suite{"S", SuiteKind::kUnit, {"/no/such/runner"}, {}};
  const auto r = run_suite(suite, {}, runner, clock);
  EXPECT_EQ(r.status, TestStatus::kError);
  EXPECT_NE(r.log_excerpt.find("spawn failed"), std::string::npos);
  FunctionRunner throwing([](const RunRequest&) -> RunOutcome { throw std::runtime_error("boom"); });
  EXPECT_EQ(run_suite(suite, {}, throwing, clock).status, TestStatus::kError);
}

TEST(Execution, LogExcerptKeepsTheTail) {
  ProcessRunner runner;
  SystemClock clock;
  SuiteRunSettings s;
  s.log_lines = 3;
  const auto r = run_suite(sh_suite("S", "for i in 1 2 3 4 5 6; do echo line$i; done"), s, runner, clock);
  EXPECT_EQ(r.log_excerpt, "line4\nline5\nline6\n");
}

TEST(Execution, EnvironmentCarriesSuiteAndCommit) {
  ProcessRunner runner;
  SystemClock clock;
  SuiteRunSettings s;
  s.commit = "c42";
  const auto r = run_suite(sh_suite("S7", "echo $FASTFAIL_SUITE $FASTFAIL_COMMIT"), s, runner, clock);
  EXPECT_EQ(r.log_excerpt, "S7 c42\n");
}

MapperDatabase suites_db(int n) {
  MapperDatabase db;
  for (int i = 0; i < n; ++i) db.add_suite({"S" + std::to_string(i), SuiteKind::kFunctional, {"fake"}, {}});
  db.add_suite({"U", SuiteKind::kUnit, {"fake"}, {"t1", "t2"}});
  return db;
}

TEST(Execution, EmptySelectionIsGreen) {
  FunctionRunner runner([](const RunRequest&) { return RunOutcome{}; });
  ManualClock clock(kT0);
  const auto report = run_selection({}, suites_db(1), {}, runner, clock);
  EXPECT_TRUE(report.results.empty());
  EXPECT_EQ(report.overall, Overall::kGreen);
}

TEST(Execution, OneFailureMakesRed) {
  FunctionRunner runner([](const RunRequest& r) {
    RunOutcome o;
    o.exit_code = r.suite_id == "S1" ? 1 : 0;
    return o;
  });
  ManualClock clock(kT0);
  SelectionResult sel;
  sel.selected_functional = {"S2", "S0", "S1"};
  const auto report = run_selection(sel, suites_db(3), {}, runner, clock);
  ASSERT_EQ(report.results.size(), 3u);
  EXPECT_EQ(report.results[0].suite_id, "S0");
  EXPECT_EQ(report.results[1].status, TestStatus::kFail);
  EXPECT_EQ(report.overall, Overall::kRed);
}

TEST(Execution, ParallelismIsObservable) {
  ProcessRunner runner;
  SystemClock clock;
  MapperDatabase db;
  SelectionResult sel;
  for (int i = 0; i < 10; ++i) {
    db.add_suite({"P" + std::to_string(i), SuiteKind::kFunctional, {"sleep", "1"}, {}});
    sel.selected_functional.push_back("P" + std::to_string(i));
  }
  ExecutionConfig cfg;
  cfg.max_parallel = 5;
  const auto start = std::chrono::steady_clock::now();
  const auto report = run_selection(sel, db, cfg, runner, clock);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(wall, 4.0);
  EXPECT_EQ(report.results.size(), 10u);
  EXPECT_EQ(report.overall, Overall::kGreen);
}

TEST(Execution, ConcurrencyNeverExceedsLimit) {
  std::atomic<int> running{0};
  std::atomic<int> peak{0};
  FunctionRunner runner([&](const RunRequest&) {
    const int now = ++running;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    --running;
    return RunOutcome{};
  });
  SystemClock clock;
  SelectionResult sel;
  for (int i = 0; i < 12; ++i) sel.selected_functional.push_back("S" + std::to_string(i));
  ExecutionConfig cfg;
  cfg.max_parallel = 3;
  const auto report = run_selection(sel, suites_db(12), cfg, runner, clock);
  EXPECT_EQ(report.results.size(), 12u);
  EXPECT_LE(peak.load(), 3);
}

TEST(Execution, FlakyRetry) {
  std::mutex mu;
  std::map<std::string, int> calls;
  FunctionRunner runner([&](const RunRequest& r) {
    std::lock_guard<std::mutex> lock(mu);
    const int n = ++calls[r.suite_id];
    RunOutcome o;
    if (r.suite_id == "S0") o.exit_code = n == 1 ? 1 : 0;  // flaky
    if (r.suite_id == "S1") o.exit_code = 1;               // broken
    return o;
  });
  ManualClock clock(kT0);
  SelectionResult sel;
  sel.selected_functional = {"S0", "S1", "S2"};
  ExecutionConfig cfg;
  cfg.retry_flaky = true;
  const auto report = run_selection(sel, suites_db(3), cfg, runner, clock);
  EXPECT_EQ(report.results[0].status, TestStatus::kPass);
  EXPECT_EQ(report.results[0].attempt, 2);
  EXPECT_FALSE(report.results[0].note.empty());
  EXPECT_EQ(report.results[1].status, TestStatus::kFail);
  EXPECT_EQ(report.results[1].attempt, 2);
  EXPECT_EQ(report.results[2].status, TestStatus::kPass);
  EXPECT_EQ(report.results[2].attempt, 1);
  EXPECT_EQ(calls["S2"], 1);

  calls.clear();
  cfg.retry_flaky = false;
  const auto once = run_selection(sel, suites_db(3), cfg, runner, clock);
  EXPECT_EQ(once.results[0].status, TestStatus::kFail);
  EXPECT_EQ(once.results[0].attempt, 1);
}

TEST(Execution, UnknownSuiteFailsBeforeRunning) {
  int calls = 0;
  FunctionRunner runner([&](const RunRequest&) {
    ++calls;
    return RunOutcome{};
  });
  ManualClock clock(kT0);
  for (const std::vector<std::string>& entries :
       {std::vector<std::string>{"S0", "Nope"}, {"S0", "U::t9"}, {"S0", "S0::x"}}) {
    try {
      run_entries(entries, suites_db(2), {}, runner, clock);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  }
  EXPECT_EQ(calls, 0);
}

TEST(Execution, CaseEntriesPassTheCaseId) {
  std::mutex mu;
  std::vector<std::vector<std::string>> argvs;
  FunctionRunner runner([&](const RunRequest& r) {
    std::lock_guard<std::mutex> lock(mu);
    argvs.push_back(r.argv);
    return RunOutcome{};
  });
  ManualClock clock(kT0);
  SelectionResult sel;
  sel.selected_unit = {"U::t2"};
  const auto report = run_selection(sel, suites_db(0), {}, runner, clock);
  ASSERT_EQ(report.results.size(), 1u);
  EXPECT_EQ(report.results[0].suite_id, "U::t2");
  EXPECT_EQ(argvs, (std::vector<std::vector<std::string>>{{"fake", "t2"}}));
}

TEST(Execution, RetryNeverDowngradesPass) {
  FunctionRunner runner([](const RunRequest&) { return RunOutcome{}; });
  ManualClock clock(kT0);
  ExecutionConfig cfg;
  cfg.retry_flaky = true;
  SelectionResult sel;
  sel.selected_functional = {"S0", "S1"};
  for (const auto& r : run_selection(sel, suites_db(2), cfg, runner, clock).results) {
    EXPECT_EQ(r.status, TestStatus::kPass);
    EXPECT_EQ(r.attempt, 1);
  }
}

TEST(Execution, WritesLogsAndJson) {
  oracle::TempDir dir;
  FunctionRunner runner([](const RunRequest& r) {
    RunOutcome o;
    o.output = "out of " + r.suite_id + "\n";
    return o;
  });
  ManualClock clock(kT0);
  ExecutionConfig cfg;
  cfg.log_dir = dir / "logs";
  SelectionResult sel;
  sel.selected_unit = {"U::t1"};
  sel.selected_functional = {"S0"};
  const auto report = run_selection(sel, suites_db(1), cfg, runner, clock);
  EXPECT_EQ(read_file(dir / "logs/S0.log"), "out of S0\n");
  EXPECT_EQ(read_file(dir / "logs/U__t1.log"), "out of U\n");
  const auto doc = nlohmann::json::parse(run_report_json(report));
  EXPECT_EQ(doc["overall"], "green");
  EXPECT_EQ(doc["results"].size(), 2u);
  EXPECT_EQ(doc["started"], "2023-11-14T22:13:20Z");
}

TEST(CollectCoverage, ParsesProducedFixtures) {
  oracle::TempDir dir;
  ProcessRunner runner;
  const std::string data = FASTFAIL_TEST_DATA;
  TestSuiteRecord suite{"Class A", SuiteKind::kFunctional, {"true"}, {}};
  auto rec = collect_coverage(suite, {"cp", data + "/sample_mapping.xml", "{coverage_out}"}, runner, dir.path(),
                              dir / "out.xml", "cov-7");
  EXPECT_EQ(rec.suite_id, "Class A");
  EXPECT_EQ(rec.run_id, "cov-7");
  EXPECT_EQ(rec.covered.size(), 3u);

  rec = collect_coverage(suite, {"sh", "-c", "cp " + data + "/two_classes.xml \"$FASTFAIL_COVERAGE_OUT\""}, runner,
                         dir.path(), dir / "two.xml", "cov-8");
  EXPECT_EQ(rec.covered.size(), 2u);

  rec = collect_coverage(suite, {"sh", "-c", "cp " + data + "/empty_classes.xml {coverage_out}"}, runner,
                         dir.path(), dir / "empty.xml", "cov-9");
  EXPECT_TRUE(rec.covered.empty());
}

TEST(CollectCoverage, MissingOrBrokenOutputNamesThePath) {
  oracle::TempDir dir;
  ProcessRunner runner;
  TestSuiteRecord suite{"S", SuiteKind::kFunctional, {"true"}, {}};
  try {
    collect_coverage(suite, {"true"}, runner, dir.path(), dir / "nothing.xml", "r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nothing.xml"), std::string::npos);
  }
  try {
    collect_coverage(suite, {"sh", "-c", "echo '<coverage>' > {coverage_out}"}, runner, dir.path(), dir / "bad.xml",
                     "r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("bad.xml"), std::string::npos);
  }
}

}  // namespace
}  // namespace fastfail
