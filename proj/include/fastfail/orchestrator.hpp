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

#ifndef FASTFAIL_ORCHESTRATOR_HPP_
#define FASTFAIL_ORCHESTRATOR_HPP_

/// @file orchestrator.hpp
///
/// Pipeline wiring: Poll -> Select -> Run -> [Bisect] -> Quality -> Report,
/// the periodic mapper scan and the watch loop.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fastfail/bisect.hpp"
#include "fastfail/execution.hpp"
#include "fastfail/mapper.hpp"
#include "fastfail/quality.hpp"
#include "fastfail/selection.hpp"
#include "fastfail/vcs.hpp"

namespace fastfail {

struct PipelinePaths {
  std::filesystem::path repo = ".";
  std::filesystem::path db = ".fastfail/mapper.json";
  std::filesystem::path state = ".fastfail/state.json";
  std::filesystem::path outdir = ".fastfail/out";
  std::filesystem::path journal;   // empty: use git on `repo`
  std::filesystem::path coverage;  // optional Cobertura directory for the quality stage
};

enum class TriggerMode { kBatch, kCommit };

struct PipelineConfig {
  double scan_interval_hours = 6;
  bool auto_bisect = true;
  bool bisect_verify_bounds = false;
  FallbackPolicy fallback_policy = FallbackPolicy::kFullRegression;
  std::size_t max_parallel = 4;
  bool retry_flaky = false;
  double timeout_seconds = 600;
  GateThresholds thresholds = GateThresholds::defaults();
  bool gate_blocks_build = false;
  NotifyConfig notify;
  TriggerMode trigger = TriggerMode::kBatch;
  PipelinePaths paths;
  RuleConfig rules;
  std::vector<TestSuiteRecord> suites;
  std::map<std::string, std::vector<std::string>> coverage_commands;
  std::map<std::string, double> durations;
  double default_duration_seconds = 60;
  std::uint64_t coverage_threshold = 1;
  bool auto_register_suites = true;
  std::size_t duplication_window = 10;
  double poll_interval_seconds = 60;
  std::size_t log_lines = 50;
  ClassifierConfig classifier = ClassifierConfig::defaults();

  /// Throws kConfig on out-of-range values.
  void validate() const;
};

/// Parses the JSON config. Relative paths resolve against `base_dir`.
/// Unknown keys are rejected with kConfig so typos surface early.
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& file);

/// Applies FASTFAIL_OUTDIR when set.
void apply_environment(PipelineConfig& config);

struct PipelineState {
  std::optional<std::string> last_green;
  std::optional<std::string> last_seen;
  std::optional<Timestamp> last_scan;
  int next_run = 1;

  bool operator==(const PipelineState&) const = default;
};

PipelineState load_state(const std::filesystem::path& file);  // missing file -> default
void save_state(const PipelineState& state, const std::filesystem::path& file);

enum class Trigger { kCommit, kScheduled, kManual };
std::string_view to_string(Trigger t);

enum class StageStatus { kOk, kRed, kError };
std::string_view to_string(StageStatus s);

struct StageRecord {
  std::string name;
  StageStatus status = StageStatus::kOk;
  double duration_seconds = 0;
  std::string message;
};

struct PipelineRun {
  std::string run_id;
  Trigger trigger = Trigger::kCommit;
  std::vector<std::string> commits;
  std::vector<StageRecord> stages;
  SelectionResult selection;
  RoiEstimate roi;
  std::optional<RunReport> run_report;
  std::optional<BisectOutcome> bisect;
  std::optional<std::filesystem::path> notification;
  std::optional<QualityReport> quality;
  std::optional<ScanDelta> scan;
  std::vector<std::string> unmapped_new_files;
  std::vector<std::string> warnings;
  Overall overall = Overall::kGreen;

  const StageRecord* stage(std::string_view name) const;
  std::filesystem::path dir(const std::filesystem::path& outdir) const { return outdir / run_id; }
};

std::string format_run_id(int n);

/// Verdict from re-running `entries` at a commit: Bad on any Fail, Skip when
/// every entry errored, Good otherwise.
VerdictOracle make_suite_oracle(std::vector<std::string> entries, const MapperDatabase& db,
                                ExecutionConfig exec, Runner& runner, const Clock& clock);

/// Collaborators injected into the pipeline so tests can run it in-process
/// with a fixed clock.
struct PipelineContext {
  const PipelineConfig& config;
  VcsAdapter& vcs;
  Runner& runner;
  const Clock& clock;
};

/// Runs the commit pipeline on `batch` (chronological, non-empty, the tail
/// of `journal`). Updates `state` (run counter, last seen, last green) and
/// writes artifacts under outdir/run_id.
PipelineRun on_commits(const std::vector<ChangeSet>& batch, const CommitJournal& journal,
                       const MapperDatabase& db, PipelineState& state, const PipelineContext& ctx,
                       Trigger trigger = Trigger::kCommit);

struct ScanOutcome {
  MapperDatabase db;
  ScanDelta delta;
  PipelineRun run;
};

/// Reconciles `db` against `repo_listing`, records the scan time in
/// `state` and writes outdir/run_id/scan.json.
ScanOutcome scheduled_scan(const MapperDatabase& db, const std::vector<ListingEntry>& repo_listing,
                           PipelineState& state, const PipelineContext& ctx);

std::string pipeline_json(const PipelineRun& run);
std::string scan_report_json(const PipelineRun& run);

/// Loads the mapper database, or an empty one when the file is missing.
MapperDatabase load_database(const std::filesystem::path& file);

class Watcher {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds, const std::atomic<bool>& stop)>;

  Watcher(const PipelineConfig& config, VcsAdapter& vcs, Runner& runner, const Clock& clock,
          std::ostream* log = nullptr);

  struct StepResult {
    std::vector<PipelineRun> runs;
    std::optional<PipelineRun> scan;
  };

  /// One poll (plus a scan when due). Throws on errors.
  StepResult step();

  /// Loops until `stop` is set or `max_iterations` steps have run. Transient
  /// I/O errors back off exponentially and are retried; other errors
  /// propagate.
  void run(const std::atomic<bool>& stop, std::optional<std::size_t> max_iterations = std::nullopt);

  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }
  const PipelineState& state() const { return state_; }

 private:
  void say(const std::string& line);

  const PipelineConfig& config_;
  VcsAdapter& vcs_;
  Runner& runner_;
  const Clock& clock_;
  std::ostream* log_;
  PipelineState state_;
  MapperDatabase db_;
  Sleeper sleeper_;
};

/// Real sleeper: waits in short slices so `stop` is honoured promptly.
void interruptible_sleep(std::chrono::milliseconds d, const std::atomic<bool>& stop);

}  // namespace fastfail

#endif  // FASTFAIL_ORCHESTRATOR_HPP_
