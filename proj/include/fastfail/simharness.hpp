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

#ifndef FASTFAIL_SIMHARNESS_HPP_
#define FASTFAIL_SIMHARNESS_HPP_

/// @file simharness.hpp
///
/// Seeded synthetic repositories with a known suite/file mapping and a
/// planted regression, plus the brute-force oracles tests compare against.
///
/// Commit 0 adds every file. Later commits modify one or more existing
/// files. A suite fails at commit c iff c is at or after the culprit and
/// the suite's mapped files intersect the culprit's changes.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fastfail/execution.hpp"
#include "fastfail/mapper.hpp"
#include "fastfail/vcs.hpp"

namespace fastfail::sim {

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t n_files = 20;
  std::size_t n_suites = 10;
  std::size_t n_commits = 20;
  double edge_density = 0.2;
  std::optional<std::size_t> regression_commit_index;
  double suite_duration_seconds = 60;
  // Files touched by each commit after the first: uniform in [1, max].
  std::size_t max_files_per_commit = 3;
  // When set, every commit after the first touches files mapped to between
  // first and second suites (inclusive); generation retries samples until
  // this holds.
  std::optional<std::pair<std::size_t, std::size_t>> impact_range;
};

struct Scenario {
  ScenarioSpec spec;
  CommitJournal journal;
  FileTree head_tree;
  std::vector<std::string> files;
  std::vector<TestSuiteRecord> suites;
  std::set<std::pair<std::string, std::string>> true_mapping;  // (suite, path)
  std::map<std::string, std::set<std::string>> files_of_suite;
  std::optional<std::string> culprit;

  bool suite_fails(const std::string& suite_id, const std::string& commit) const;
  std::vector<std::string> failing_suites(const std::string& commit) const;
  std::map<std::string, double> durations() const;
};

/// Throws kValidation for zero files/suites/commits, density outside [0,1],
/// an out-of-range regression index, or when the culprit cannot touch any
/// mapped file.
Scenario generate(const ScenarioSpec& spec);

/// One record per suite covering its mapped files (lines 1..5, one hit each).
std::vector<CoverageRecord> coverage_records(const Scenario& scenario,
                                             const std::string& run_id = "sim-coverage");

/// Listing of the head tree; each hash is the digest of the file's version.
std::vector<ListingEntry> listing(const Scenario& scenario);

/// Database built through bootstrap from the scenario's coverage.
MapperDatabase build_database(const Scenario& scenario);

/// In-process runner: exit 1 when the suite fails at request.commit, 0
/// otherwise, 2 for an unknown suite or commit.
FunctionRunner make_runner(const Scenario& scenario);

/// Every suite whose true mapped set intersects `changed`.
std::set<std::string> oracle_select(const Scenario& scenario, const std::set<std::string>& changed);

/// Linear scan from the first commit for the first commit where any suite
/// fails; nullopt when nothing ever fails.
std::optional<std::string> oracle_bisect(const Scenario& scenario);

/// Deterministic Java-like source for a file at a given version.
std::string source_text(const std::string& path, const std::string& version);

/// Writes journal.txt, repo/, coverage/, expect/, suites/run.sh and
/// config.json under `out`. Suite commands run suites/run.sh, which fails
/// when $FASTFAIL_COMMIT is listed in expect/<suite>.fail.
void materialize_scenario(const Scenario& scenario, const std::filesystem::path& out);

}  // namespace fastfail::sim

#endif  // FASTFAIL_SIMHARNESS_HPP_
