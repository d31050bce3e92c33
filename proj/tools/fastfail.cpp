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

// fastfail: change-aware CI driver.
//
// Exit codes: 0 green, 1 red, 2 usage/configuration error (any other
// failure is reported the same way).

#include <csignal>
#include <atomic>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "fastfail/coverage.hpp"
#include "fastfail/error.hpp"
#include "fastfail/lexer.hpp"
#include "fastfail/orchestrator.hpp"
#include "fastfail/simharness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fastfail;

namespace {

constexpr int kGreen = 0;
constexpr int kRed = 1;
constexpr int kUsage = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

struct Globals {
  std::string config;
  std::string journal;
};

PipelineConfig resolve_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? parse_config("{}", fs::current_path()) : load_config(g.config);
  if (!g.journal.empty()) cfg.paths.journal = fs::absolute(g.journal);
  apply_environment(cfg);
  return cfg;
}

std::unique_ptr<VcsAdapter> make_vcs(const PipelineConfig& cfg) {
  if (!cfg.paths.journal.empty()) return std::make_unique<JournalAdapter>(cfg.paths.journal, cfg.paths.repo);
  std::error_code ec;
  if (fs::exists(cfg.paths.repo / ".git", ec)) return std::make_unique<GitAdapter>(cfg.paths.repo);
  throw Error(ErrorKind::kConfig,
              "no journal given (--journal or paths.journal) and " + cfg.paths.repo.string() +
                  " is not a git work tree");
}

std::vector<fs::path> scan_excludes(const PipelineConfig& cfg) {
  return {cfg.paths.outdir, cfg.paths.db.parent_path(), cfg.paths.state.parent_path()};
}

MapperDatabase database_with_catalog(const PipelineConfig& cfg) {
  MapperDatabase db = load_database(cfg.paths.db);
  for (const auto& s : cfg.suites) {
    if (db.find_suite(s.id) == nullptr) db.add_suite(s);
  }
  return db;
}

ExecutionConfig execution_config(const PipelineConfig& cfg) {
  ExecutionConfig e;
  e.max_parallel = cfg.max_parallel;
  e.retry_flaky = cfg.retry_flaky;
  e.timeout_seconds = cfg.timeout_seconds;
  e.workdir = cfg.paths.repo;
  e.log_lines = cfg.log_lines;
  return e;
}

int cmd_bootstrap(const Globals& g, const std::string& coverage_dir, const std::string& repo,
                  bool collect) {
  PipelineConfig cfg = resolve_config(g);
  if (!repo.empty()) cfg.paths.repo = repo;
  SystemClock clock;
  const std::string run_id = "bootstrap-" + std::to_string(to_unix_seconds(clock.now_seconds()));
  if (collect) {
    ProcessRunner runner;
    for (const auto& s : cfg.suites) {
      auto it = cfg.coverage_commands.find(s.id);
      if (it == cfg.coverage_commands.end()) continue;
      collect_coverage(s, it->second, runner, cfg.paths.repo, fs::path(coverage_dir) / (s.id + ".xml"),
                       run_id);
      std::cout << "collected coverage for " << s.id << "\n";
    }
  }
  const auto records = load_coverage_dir(coverage_dir, run_id);
  const auto listing = scan_directory(cfg.paths.repo, scan_excludes(cfg));
  IngestReport report;
  IngestOptions opts;
  opts.threshold = cfg.coverage_threshold;
  opts.auto_register = cfg.auto_register_suites;
  opts.now = clock.now_seconds();
  opts.classifier = cfg.classifier;
  opts.report = &report;
  const MapperDatabase db = bootstrap(records, listing, cfg.suites, opts);
  write_file_atomic(cfg.paths.db, save(db));
  std::cout << "mapper database " << cfg.paths.db.string() << ": " << db.files().size()
            << " code file(s), " << db.suites().size() << " suite(s), " << db.edges().size()
            << " edge(s)\n";
  for (const auto& p : report.unknown_paths) {
    std::cerr << "warning: coverage for " << p << " which is not in the repository listing\n";
  }
  return kGreen;
}

int cmd_scan(const Globals& g) {
  const PipelineConfig cfg = resolve_config(g);
  SystemClock clock;
  auto vcs = make_vcs(cfg);
  FunctionRunner idle([](const RunRequest&) { return RunOutcome{}; });
  PipelineState state = load_state(cfg.paths.state);
  const MapperDatabase db = database_with_catalog(cfg);
  const auto listing = scan_directory(cfg.paths.repo, scan_excludes(cfg));
  const PipelineContext ctx{cfg, *vcs, idle, clock};
  const ScanOutcome out = scheduled_scan(db, listing, state, ctx);
  if (!out.delta.empty()) write_file_atomic(cfg.paths.db, save(out.db));
  save_state(state, cfg.paths.state);
  std::cout << scan_report_json(out.run);
  return kGreen;
}

int cmd_select(const Globals& g, const std::string& from, const std::string& to) {
  const PipelineConfig cfg = resolve_config(g);
  auto vcs = make_vcs(cfg);
  const CommitJournal journal = vcs->history();
  const NetChanges net =
      changes_between(journal, from.empty() ? std::nullopt : std::optional<std::string>(from), to);
  const MapperDatabase db = database_with_catalog(cfg);
  const SelectionResult sel = select_all(db, net, SelectionPolicy{cfg.fallback_policy, cfg.classifier});
  RoiEstimate roi;
  try {
    roi = estimate_savings(sel, db, cfg.durations, cfg.default_duration_seconds);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerate) throw;
    std::cerr << "warning: " << e.what() << "\n";
  }
  std::cout << selection_report_json(sel, roi);
  return kGreen;
}

int cmd_run(const Globals& g) {
  const PipelineConfig cfg = resolve_config(g);
  SystemClock clock;
  ProcessRunner runner;
  auto vcs = make_vcs(cfg);
  PipelineState state = load_state(cfg.paths.state);
  const CommitJournal journal = vcs->history();
  const auto pending = poll(*vcs, state.last_seen);
  if (pending.empty()) {
    std::cout << "no new commits since " << state.last_seen.value_or("(none)") << "\n";
    return kGreen;
  }
  const MapperDatabase db = database_with_catalog(cfg);
  const PipelineContext ctx{cfg, *vcs, runner, clock};
  const PipelineRun run = on_commits(pending, journal, db, state, ctx, Trigger::kManual);
  save_state(state, cfg.paths.state);
  std::cout << pipeline_json(run);
  return run.overall == Overall::kGreen ? kGreen : kRed;
}

int cmd_bisect(const Globals& g, const std::string& good, const std::string& bad,
               std::vector<std::string> suites) {
  const PipelineConfig cfg = resolve_config(g);
  SystemClock clock;
  ProcessRunner runner;
  auto vcs = make_vcs(cfg);
  const CommitJournal journal = vcs->history();
  const MapperDatabase db = database_with_catalog(cfg);
  if (suites.empty()) {
    for (const auto& [id, _] : db.suites()) suites.push_back(id);
  }
  const ExecutionConfig exec = execution_config(cfg);
  const auto oracle = make_suite_oracle(suites, db, exec, runner, clock);
  const BisectOutcome out = bisect_run(journal, good, bad, oracle, BisectOptions{cfg.bisect_verify_bounds});
  const fs::path dir = cfg.paths.outdir / ("bisect-" + bad);
  write_file_atomic(dir / "bisect.json", bisect_transcript_json(out));
  std::cout << bisect_transcript_json(out);
  if (out.result.kind != BisectState::Kind::kFound) return kRed;

  ExecutionConfig at_bad = exec;
  at_bad.commit = bad;
  std::vector<std::string> failing;
  for (const auto& r : run_entries(suites, db, at_bad, runner, clock).results) {
    if (r.status == TestStatus::kFail || r.status == TestStatus::kError) failing.push_back(r.suite_id);
  }
  const auto msg = render_notification(out.result.found, journal, failing, out.probes.size(), cfg.notify);
  std::cerr << "notification written to " << write_notification(msg, dir, out.result.found).string()
            << "\n";
  return kGreen;
}

int cmd_quality(const Globals& g, const std::string& repo) {
  PipelineConfig cfg = resolve_config(g);
  if (!repo.empty()) cfg.paths.repo = repo;
  std::vector<TokenizedFile> files;
  for (const auto& entry : scan_directory(cfg.paths.repo, scan_excludes(cfg))) {
    if (classify_path(entry.path, cfg.classifier) != Classification::kCode) continue;
    try {
      files.push_back(tokenize(read_file(cfg.paths.repo / entry.path), entry.path));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kLex) throw;
      std::cerr << "warning: skipped " << e.what() << "\n";
    }
  }
  std::vector<CoverageRecord> coverage;
  std::error_code ec;
  if (!cfg.paths.coverage.empty() && fs::is_directory(cfg.paths.coverage, ec)) {
    coverage = load_coverage_dir(cfg.paths.coverage, "quality");
  }
  const QualityReport report =
      seven_axes(files, coverage, RunReport{}, QualityOptions{cfg.rules, cfg.thresholds, cfg.duplication_window});
  const fs::path dir = cfg.paths.outdir / "quality";
  write_file_atomic(dir / "quality.json", quality_report_json(report));
  write_file_atomic(dir / "quality.html", quality_dashboard_html(report, cfg.thresholds));
  std::cout << quality_report_json(report);
  return report.gate == Gate::kRed ? kRed : kGreen;
}

int cmd_watch(const Globals& g, std::optional<std::size_t> iterations) {
  const PipelineConfig cfg = resolve_config(g);
  SystemClock clock;
  ProcessRunner runner;
  auto vcs = make_vcs(cfg);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  Watcher watcher(cfg, *vcs, runner, clock, &std::cout);
  watcher.run(g_stop, iterations);
  return kGreen;
}

int cmd_report(const Globals& g, const std::string& run_id) {
  const PipelineConfig cfg = resolve_config(g);
  const fs::path file = cfg.paths.outdir / run_id / "pipeline.json";
  std::error_code ec;
  if (!fs::exists(file, ec)) throw Error(ErrorKind::kLookup, "no report for run '" + run_id + "'");
  const std::string text = read_file(file);
  std::cout << text;
  const auto doc = nlohmann::json::parse(text);
  return doc.value("overall", std::string("red")) == "green" ? kGreen : kRed;
}

int cmd_simgen(const sim::ScenarioSpec& spec, const std::string& out) {
  const sim::Scenario sc = sim::generate(spec);
  sim::materialize_scenario(sc, out);
  std::cout << "scenario seed " << spec.seed << ": " << sc.files.size() << " file(s), "
            << sc.suites.size() << " suite(s), " << sc.journal.size() << " commit(s)";
  if (sc.culprit) std::cout << ", culprit " << *sc.culprit;
  std::cout << "\nwritten to " << fs::absolute(out).string() << "\n";
  return kGreen;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastfail: change-aware test selection, bisection and quality gate"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--journal", g.journal, "commit journal file (selects the journal adapter)");

  std::string coverage_dir, repo;
  bool collect = false;
  auto* bootstrap_cmd = app.add_subcommand("bootstrap", "build the mapper database from coverage");
  bootstrap_cmd->add_option("--coverage", coverage_dir, "directory of Cobertura/text coverage files")
      ->required();
  bootstrap_cmd->add_option("--repo", repo, "repository root to list");
  bootstrap_cmd->add_flag("--collect", collect, "run each suite's coverage_command first");

  auto* scan_cmd = app.add_subcommand("scan", "reconcile the database with the repository listing");

  std::string from, to;
  auto* select_cmd = app.add_subcommand("select", "select suites for a commit range");
  select_cmd->add_option("--from", from, "exclusive start commit (omit for the root)");
  select_cmd->add_option("--to", to, "inclusive end commit")->required();

  auto* run_cmd = app.add_subcommand("run", "run the pipeline once over pending commits");

  std::string good, bad;
  std::vector<std::string> bisect_suites;
  auto* bisect_cmd = app.add_subcommand("bisect", "find the first bad commit");
  bisect_cmd->add_option("--good", good, "known-good commit")->required();
  bisect_cmd->add_option("--bad", bad, "known-bad commit")->required();
  bisect_cmd->add_option("--suite", bisect_suites, "suite (or suite::case) used as oracle; repeatable");

  std::string quality_repo;
  auto* quality_cmd = app.add_subcommand("quality", "seven-axis quality report of the repository");
  quality_cmd->add_option("--repo", quality_repo, "repository root");

  std::size_t iterations = 0;
  auto* watch_cmd = app.add_subcommand("watch", "poll for commits and run the pipeline");
  watch_cmd->add_option("--iterations", iterations)->group("");

  std::string run_id;
  auto* report_cmd = app.add_subcommand("report", "print a pipeline run report");
  report_cmd->add_option("--run", run_id, "run id, e.g. run-000001")->required();

  sim::ScenarioSpec spec;
  spec.n_files = 40;
  spec.n_suites = 10;
  spec.n_commits = 12;
  spec.edge_density = 0.15;
  std::string sim_out;
  std::optional<std::size_t> culprit;
  auto* simgen_cmd = app.add_subcommand("simgen", "write a synthetic scenario to disk");
  simgen_cmd->add_option("--seed", spec.seed, "generator seed")->required();
  simgen_cmd->add_option("--out", sim_out, "output directory")->required();
  simgen_cmd->add_option("--files", spec.n_files);
  simgen_cmd->add_option("--suites", spec.n_suites);
  simgen_cmd->add_option("--commits", spec.n_commits);
  simgen_cmd->add_option("--density", spec.edge_density);
  simgen_cmd->add_option("--culprit", culprit, "commit index of the planted regression");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*bootstrap_cmd) return cmd_bootstrap(g, coverage_dir, repo, collect);
    if (*scan_cmd) return cmd_scan(g);
    if (*select_cmd) return cmd_select(g, from, to);
    if (*run_cmd) return cmd_run(g);
    if (*bisect_cmd) return cmd_bisect(g, good, bad, bisect_suites);
    if (*quality_cmd) return cmd_quality(g, quality_repo);
    if (*watch_cmd) {
      return cmd_watch(g, iterations > 0 ? std::optional<std::size_t>(iterations) : std::nullopt);
    }
    if (*report_cmd) return cmd_report(g, run_id);
    if (*simgen_cmd) {
      spec.regression_commit_index = culprit.value_or(spec.n_commits * 2 / 3);
      return cmd_simgen(spec, sim_out);
    }
  } catch (const Error& e) {
    std::cerr << "fastfail: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "fastfail: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
