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

#include "fastfail/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <thread>

#include "fastfail/coverage.hpp"
#include "fastfail/error.hpp"
#include "fastfail/lexer.hpp"
#include "json.hpp"

namespace fastfail {

namespace fs = std::filesystem;
using nlohmann::json;

// --- config --------------------------------------------------------------------------

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  if (!(scan_interval_hours > 0)) fail("scan_interval_hours must be > 0");
  if (max_parallel == 0) fail("max_parallel must be >= 1");
  if (!(timeout_seconds > 0)) fail("timeout_seconds must be > 0");
  if (!(default_duration_seconds > 0)) fail("default_duration_s must be > 0");
  if (coverage_threshold == 0) fail("coverage_threshold must be >= 1");
  if (duplication_window < 2) fail("duplication_window must be >= 2");
  if (!(poll_interval_seconds >= 0)) fail("poll_interval_seconds must be >= 0");
  thresholds.validate();
  std::set<std::string> known;
  for (const auto& r : registered_rules()) known.insert(r.id);
  for (const auto& [id, _] : rules) {
    if (!known.count(id)) fail("unknown rule id '" + id + "'");
  }
  std::set<std::string> ids;
  for (const auto& s : suites) {
    if (s.id.empty()) fail("suite with empty id");
    if (!ids.insert(s.id).second) fail("duplicate suite id '" + s.id + "'");
    if (s.command.empty()) fail("suite '" + s.id + "' has an empty command");
  }
  for (const auto& [id, d] : durations) {
    if (!(d >= 0)) fail("duration for '" + id + "' must be >= 0");
  }
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::kConfig, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::kConfig, "unknown key '" + key + "' in " + where);
  }
}

std::optional<AxisThreshold> parse_axis(const json& j, const std::string& name) {
  if (j.is_null()) return std::nullopt;
  check_keys(j, {"yellow", "red"}, "gate." + name);
  if (!j.contains("yellow") || !j.contains("red")) {
    throw Error(ErrorKind::kConfig, "gate." + name + " needs both yellow and red");
  }
  return AxisThreshold{j.at("yellow").get<double>(), j.at("red").get<double>()};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  try {
    check_keys(doc,
               {"scan_interval_hours", "auto_bisect", "bisect_verify_bounds", "fallback_policy",
                "max_parallel", "retry_flaky", "timeout_seconds", "gate", "gate_blocks_build",
                "manager_address", "cc", "trigger", "paths", "rules", "suites", "durations",
                "default_duration_s", "coverage_threshold", "auto_register_suites",
                "duplication_window", "poll_interval_seconds", "log_lines", "classifier"},
               "config");
    c.scan_interval_hours = doc.value("scan_interval_hours", c.scan_interval_hours);
    c.auto_bisect = doc.value("auto_bisect", c.auto_bisect);
    c.bisect_verify_bounds = doc.value("bisect_verify_bounds", c.bisect_verify_bounds);
    if (doc.contains("fallback_policy")) {
      try {
        c.fallback_policy = fallback_policy_from_string(doc.at("fallback_policy").get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorKind::kConfig, e.what());
      }
    }
    c.max_parallel = doc.value("max_parallel", c.max_parallel);
    c.retry_flaky = doc.value("retry_flaky", c.retry_flaky);
    c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
    c.gate_blocks_build = doc.value("gate_blocks_build", c.gate_blocks_build);
    c.notify.manager_address = doc.value("manager_address", std::string());
    c.notify.cc = doc.value("cc", std::vector<std::string>{});
    if (doc.contains("trigger")) {
      const auto t = doc.at("trigger").get<std::string>();
      if (t == "batch") {
        c.trigger = TriggerMode::kBatch;
      } else if (t == "commit") {
        c.trigger = TriggerMode::kCommit;
      } else {
        throw Error(ErrorKind::kConfig, "trigger must be \"batch\" or \"commit\"");
      }
    }
    if (doc.contains("gate")) {
      const json& g = doc.at("gate");
      check_keys(g,
                 {"coverage", "duplication", "max_complexity", "comment_density",
                  "rule_compliance", "potential_bugs", "test_success"},
                 "gate");
      auto axis = [&](const char* name, std::optional<AxisThreshold>& slot) {
        if (g.contains(name)) slot = parse_axis(g.at(name), name);
      };
      axis("coverage", c.thresholds.coverage);
      axis("duplication", c.thresholds.duplication);
      axis("max_complexity", c.thresholds.max_complexity);
      axis("comment_density", c.thresholds.comment_density);
      axis("rule_compliance", c.thresholds.rule_compliance);
      axis("potential_bugs", c.thresholds.potential_bugs);
      axis("test_success", c.thresholds.test_success);
    }
    const fs::path base = base_dir.empty() ? fs::path(".") : base_dir;
    c.paths.repo = base / c.paths.repo;
    c.paths.db = base / c.paths.db;
    c.paths.state = base / c.paths.state;
    c.paths.outdir = base / c.paths.outdir;
    if (doc.contains("paths")) {
      const json& p = doc.at("paths");
      check_keys(p, {"repo", "db", "state", "outdir", "journal", "coverage"}, "paths");
      auto set = [&](const char* key, fs::path& slot) {
        if (p.contains(key)) slot = resolve(base, p.at(key).get<std::string>());
      };
      set("repo", c.paths.repo);
      set("db", c.paths.db);
      set("state", c.paths.state);
      set("outdir", c.paths.outdir);
      set("journal", c.paths.journal);
      set("coverage", c.paths.coverage);
    }
    if (doc.contains("rules")) c.rules = doc.at("rules").get<RuleConfig>();
    if (doc.contains("suites")) {
      for (const json& s : doc.at("suites")) {
        check_keys(s, {"id", "kind", "command", "cases", "coverage_command", "duration_s"}, "suites[]");
        TestSuiteRecord rec;
        rec.id = s.at("id").get<std::string>();
        try {
          rec.kind = suite_kind_from_string(s.value("kind", std::string("functional")));
        } catch (const Error& e) {
          throw Error(ErrorKind::kConfig, e.what());
        }
        rec.command = s.value("command", std::vector<std::string>{});
        rec.case_ids = s.value("cases", std::vector<std::string>{});
        if (s.contains("coverage_command")) {
          c.coverage_commands[rec.id] = s.at("coverage_command").get<std::vector<std::string>>();
        }
        if (s.contains("duration_s")) c.durations[rec.id] = s.at("duration_s").get<double>();
        c.suites.push_back(std::move(rec));
      }
    }
    if (doc.contains("durations")) {
      for (const auto& [id, d] : doc.at("durations").items()) c.durations[id] = d.get<double>();
    }
    c.default_duration_seconds = doc.value("default_duration_s", c.default_duration_seconds);
    c.coverage_threshold = doc.value("coverage_threshold", c.coverage_threshold);
    c.auto_register_suites = doc.value("auto_register_suites", c.auto_register_suites);
    c.duplication_window = doc.value("duplication_window", c.duplication_window);
    c.poll_interval_seconds = doc.value("poll_interval_seconds", c.poll_interval_seconds);
    c.log_lines = doc.value("log_lines", c.log_lines);
    if (doc.contains("classifier")) {
      const json& k = doc.at("classifier");
      check_keys(k, {"source_extensions", "test_asset_roots", "config_dirs"}, "classifier");
      if (k.contains("source_extensions")) {
        c.classifier.source_extensions = k.at("source_extensions").get<std::set<std::string>>();
      }
      if (k.contains("test_asset_roots")) {
        c.classifier.test_asset_roots = k.at("test_asset_roots").get<std::vector<std::string>>();
      }
      if (k.contains("config_dirs")) {
        c.classifier.config_dirs = k.at("config_dirs").get<std::set<std::string>>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const fs::path& file) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  return parse_config(text, fs::absolute(file).parent_path());
}

void apply_environment(PipelineConfig& config) {
  if (const char* out = std::getenv("FASTFAIL_OUTDIR"); out != nullptr && *out != '\0') {
    config.paths.outdir = out;
  }
}

// --- state ---------------------------------------------------------------------------

PipelineState load_state(const fs::path& file) {
  PipelineState s;
  std::error_code ec;
  if (!fs::exists(file, ec)) return s;
  try {
    const json doc = json::parse(read_file(file));
    if (doc.contains("last_green") && !doc.at("last_green").is_null()) {
      s.last_green = doc.at("last_green").get<std::string>();
    }
    if (doc.contains("last_seen") && !doc.at("last_seen").is_null()) {
      s.last_seen = doc.at("last_seen").get<std::string>();
    }
    if (doc.contains("last_scan") && !doc.at("last_scan").is_null()) {
      s.last_scan = parse_rfc3339(doc.at("last_scan").get<std::string>());
    }
    s.next_run = doc.value("next_run", 1);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "state file " + file.string() + ": " + e.what());
  }
  return s;
}

void save_state(const PipelineState& state, const fs::path& file) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  const json doc = {{"last_green", opt(state.last_green)},
                    {"last_seen", opt(state.last_seen)},
                    {"last_scan", state.last_scan ? json(format_rfc3339(*state.last_scan)) : json(nullptr)},
                    {"next_run", state.next_run}};
  write_file_atomic(file, doc.dump(2) + "\n");
}

MapperDatabase load_database(const fs::path& file) {
  std::error_code ec;
  if (!fs::exists(file, ec)) return {};
  return load(read_file(file));
}

// --- pipeline --------------------------------------------------------------------------

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::kCommit: return "commit";
    case Trigger::kScheduled: return "scheduled";
    case Trigger::kManual: return "manual";
  }
  return "manual";
}

std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::kOk: return "ok";
    case StageStatus::kRed: return "red";
    case StageStatus::kError: return "error";
  }
  return "error";
}

const StageRecord* PipelineRun::stage(std::string_view name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string format_run_id(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run-%06d", n);
  return buf;
}

namespace {

double seconds_between(std::chrono::system_clock::time_point a, std::chrono::system_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// Runs one stage, recording it. Returns false when the stage errored.
template <typename Fn>
bool stage(PipelineRun& run, const Clock& clock, std::string name, Fn&& body) {
  StageRecord rec;
  rec.name = std::move(name);
  const auto start = clock.now();
  try {
    body(rec);
  } catch (const std::exception& e) {
    rec.status = StageStatus::kError;
    rec.message = e.what();
  }
  rec.duration_seconds = seconds_between(start, clock.now());
  const bool ok = rec.status != StageStatus::kError;
  run.stages.push_back(std::move(rec));
  return ok;
}

std::vector<TokenizedFile> analyzable_files(const std::vector<std::string>& paths, const fs::path& root,
                                            std::vector<std::string>& warnings) {
  std::vector<TokenizedFile> out;
  for (const auto& p : paths) {
    const fs::path file = root / p;
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) {
      warnings.push_back("quality: " + p + " missing from " + root.string());
      continue;
    }
    try {
      out.push_back(tokenize(read_file(file), p));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kLex) throw;
      warnings.push_back(std::string("quality: skipped ") + e.what());
    }
  }
  return out;
}

std::vector<std::string> failing_entries(const RunReport& report) {
  std::vector<std::string> out;
  for (const auto& r : report.results) {
    if (r.status == TestStatus::kFail || r.status == TestStatus::kError) out.push_back(r.suite_id);
  }
  return out;
}

}  // namespace

VerdictOracle make_suite_oracle(std::vector<std::string> entries, const MapperDatabase& db,
                                ExecutionConfig exec, Runner& runner, const Clock& clock) {
  exec.log_dir.reset();
  return [entries = std::move(entries), &db, exec = std::move(exec), &runner,
          &clock](const std::string& commit) {
    ExecutionConfig e = exec;
    e.commit = commit;
    const RunReport probe = run_entries(entries, db, e, runner, clock);
    bool any_fail = false, all_error = !probe.results.empty();
    for (const auto& r : probe.results) {
      any_fail = any_fail || r.status == TestStatus::kFail;
      all_error = all_error && r.status == TestStatus::kError;
    }
    if (any_fail) return Verdict::kBad;
    return all_error ? Verdict::kSkip : Verdict::kGood;
  };
}

PipelineRun on_commits(const std::vector<ChangeSet>& batch, const CommitJournal& journal,
                       const MapperDatabase& db, PipelineState& state, const PipelineContext& ctx,
                       Trigger trigger) {
  if (batch.empty()) throw Error(ErrorKind::kValidation, "on_commits needs a non-empty batch");
  const PipelineConfig& cfg = ctx.config;
  PipelineRun run;
  run.run_id = format_run_id(state.next_run++);
  run.trigger = trigger;
  for (const auto& c : batch) run.commits.push_back(c.id);
  const std::string head = batch.back().id;
  const fs::path outdir = run.dir(cfg.paths.outdir);

  NetChanges net;
  bool ok = stage(run, ctx.clock, "Poll", [&](StageRecord& rec) {
    for (std::size_t i = 1; i < batch.size(); ++i) {
      if (batch[i].parent != std::optional<std::string>(batch[i - 1].id)) {
        throw Error(ErrorKind::kValidation, "batch is not a contiguous commit range");
      }
    }
    journal.require_index(head);
    net = net_changes(batch);
    rec.message = std::to_string(batch.size()) + " commit(s), " + std::to_string(net.size()) +
                  " changed path(s)";
  });

  if (ok) {
    ok = stage(run, ctx.clock, "Select", [&](StageRecord& rec) {
      SelectionPolicy policy{cfg.fallback_policy, cfg.classifier};
      run.selection = select_all(db, net, policy);
      try {
        run.roi = estimate_savings(run.selection, db, cfg.durations, cfg.default_duration_seconds);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerate) throw;
        run.warnings.push_back(std::string("roi: ") + e.what());
      }
      if (!run.selection.unmapped_code_paths.empty()) {
        run.warnings.push_back(std::to_string(run.selection.unmapped_code_paths.size()) +
                               " changed code file(s) have no mapped suites");
      }
      write_file_atomic(outdir / "selection.json", selection_report_json(run.selection, run.roi));
      rec.message = std::to_string(run.selection.selected_functional.size()) + " functional, " +
                    std::to_string(run.selection.selected_unit.size()) + " unit, fallback " +
                    std::string(to_string(run.selection.fallback));
    });
  }

  ExecutionConfig exec;
  exec.max_parallel = cfg.max_parallel;
  exec.retry_flaky = cfg.retry_flaky;
  exec.timeout_seconds = cfg.timeout_seconds;
  exec.workdir = cfg.paths.repo;
  exec.log_lines = cfg.log_lines;

  if (ok && !run.selection.empty()) {
    ok = stage(run, ctx.clock, "Run", [&](StageRecord& rec) {
      ExecutionConfig e = exec;
      e.commit = head;
      e.log_dir = outdir / "logs";
      run.run_report = run_selection(run.selection, db, e, ctx.runner, ctx.clock);
      write_file_atomic(outdir / "run_report.json", run_report_json(*run.run_report));
      const auto failing = failing_entries(*run.run_report);
      rec.status = run.run_report->overall == Overall::kRed ? StageStatus::kRed : StageStatus::kOk;
      rec.message = std::to_string(run.run_report->results.size()) + " executed, " +
                    std::to_string(failing.size()) + " failing";
    });
  }

  const bool red_tests = run.run_report && run.run_report->overall == Overall::kRed;
  if (ok && red_tests && cfg.auto_bisect) {
    if (!state.last_green) {
      run.warnings.push_back("bisect skipped: no known-green commit recorded");
    } else {
      ok = stage(run, ctx.clock, "Bisect", [&](StageRecord& rec) {
        const auto failing = failing_entries(*run.run_report);
        VerdictOracle oracle = make_suite_oracle(failing, db, exec, ctx.runner, ctx.clock);
        run.bisect = bisect_run(journal, *state.last_green, head, oracle,
                                BisectOptions{cfg.bisect_verify_bounds});
        write_file_atomic(outdir / "bisect.json", bisect_transcript_json(*run.bisect));
        if (run.bisect->result.kind == BisectState::Kind::kFound) {
          const std::string& culprit = run.bisect->result.found;
          const auto msg = render_notification(culprit, journal, failing, run.bisect->probes.size(),
                                               cfg.notify);
          run.notification = write_notification(msg, outdir, culprit);
          rec.message = "culprit " + culprit + " after " +
                        std::to_string(run.bisect->probes.size()) + " probe(s)";
        } else {
          std::string set;
          for (const auto& c : run.bisect->result.ambiguous) set += (set.empty() ? "" : " ") + c;
          rec.message = "ambiguous: " + set;
          run.warnings.push_back("bisect could not isolate a single commit; no notification sent");
        }
      });
    }
  }

  if (ok) {
    ok = stage(run, ctx.clock, "Quality", [&](StageRecord& rec) {
      std::vector<std::string> code;
      for (const auto& [path, _] : materialize(journal, head)) {
        if (classify_path(path, cfg.classifier) == Classification::kCode) code.push_back(path);
      }
      const auto files = analyzable_files(code, cfg.paths.repo, run.warnings);
      std::vector<CoverageRecord> coverage;
      std::error_code ec;
      if (!cfg.paths.coverage.empty() && fs::is_directory(cfg.paths.coverage, ec)) {
        coverage = load_coverage_dir(cfg.paths.coverage, run.run_id);
      }
      QualityOptions opts{cfg.rules, cfg.thresholds, cfg.duplication_window};
      run.quality = seven_axes(files, coverage, run.run_report.value_or(RunReport{}), opts);
      for (const auto& w : run.quality->warnings) run.warnings.push_back("quality: " + w);
      write_file_atomic(outdir / "quality.json", quality_report_json(*run.quality));
      write_file_atomic(outdir / "quality.html", quality_dashboard_html(*run.quality, cfg.thresholds));
      rec.status = run.quality->gate == Gate::kRed ? StageStatus::kRed : StageStatus::kOk;
      rec.message = "gate " + std::string(to_string(run.quality->gate)) + " over " +
                    std::to_string(files.size()) + " file(s)";
    });
  }

  const bool stage_error = std::any_of(run.stages.begin(), run.stages.end(), [](const StageRecord& s) {
    return s.status == StageStatus::kError;
  });
  const bool gate_red = cfg.gate_blocks_build && run.quality && run.quality->gate == Gate::kRed;
  run.overall = (red_tests || stage_error || gate_red) ? Overall::kRed : Overall::kGreen;

  stage(run, ctx.clock, "Report", [&](StageRecord& rec) {
    rec.message = "overall " + std::string(to_string(run.overall));
  });
  // Report is the last stage; pipeline.json includes its own record.
  write_file_atomic(outdir / "pipeline.json", pipeline_json(run));

  state.last_seen = head;
  if (run.overall == Overall::kGreen) state.last_green = head;
  return run;
}

ScanOutcome scheduled_scan(const MapperDatabase& db, const std::vector<ListingEntry>& repo_listing,
                           PipelineState& state, const PipelineContext& ctx) {
  const PipelineConfig& cfg = ctx.config;
  ScanOutcome out{db, {}, {}};
  out.run.run_id = format_run_id(state.next_run++);
  out.run.trigger = Trigger::kScheduled;
  const auto now = ctx.clock.now_seconds();
  const bool ok = stage(out.run, ctx.clock, "Scan", [&](StageRecord& rec) {
    auto result = reconcile(db, repo_listing, now, cfg.classifier);
    out.db = std::move(result.db);
    out.delta = std::move(result.delta);
    for (const auto& p : out.delta.added) {
      if (out.db.find_file(p) != nullptr && !out.db.has_edges(p)) out.run.unmapped_new_files.push_back(p);
    }
    rec.message = std::to_string(out.delta.added.size()) + " added, " +
                  std::to_string(out.delta.removed.size()) + " removed, " +
                  std::to_string(out.delta.modified.size()) + " modified";
  });
  out.run.scan = out.delta;
  if (!ok) out.run.overall = Overall::kRed;
  stage(out.run, ctx.clock, "Report", [&](StageRecord&) {});
  write_file_atomic(out.run.dir(cfg.paths.outdir) / "scan.json", scan_report_json(out.run));
  write_file_atomic(out.run.dir(cfg.paths.outdir) / "pipeline.json", pipeline_json(out.run));
  state.last_scan = now;
  return out;
}

std::string pipeline_json(const PipelineRun& run) {
  json stages = json::array();
  for (const auto& s : run.stages) {
    stages.push_back({{"name", s.name},
                      {"status", to_string(s.status)},
                      {"duration_s", s.duration_seconds},
                      {"message", s.message}});
  }
  json doc = {{"run_id", run.run_id},
              {"trigger", to_string(run.trigger)},
              {"commits", run.commits},
              {"stages", std::move(stages)},
              {"overall", to_string(run.overall)},
              {"warnings", run.warnings}};
  if (run.stage("Select") != nullptr) {
    doc["selection"] = {{"functional", run.selection.selected_functional},
                        {"unit", run.selection.selected_unit},
                        {"unmapped", run.selection.unmapped_code_paths},
                        {"fallback", to_string(run.selection.fallback)}};
    doc["roi"] = {{"selected_s", run.roi.selected_seconds},
                  {"full_s", run.roi.full_seconds},
                  {"reduction", run.roi.reduction_fraction}};
  }
  if (run.run_report) {
    doc["run"] = {{"overall", to_string(run.run_report->overall)},
                  {"executed", run.run_report->results.size()},
                  {"failing", failing_entries(*run.run_report)}};
  }
  if (run.bisect) {
    json result = json::object();
    if (run.bisect->result.kind == BisectState::Kind::kFound) {
      result["found"] = run.bisect->result.found;
    } else {
      result["ambiguous"] = run.bisect->result.ambiguous;
    }
    doc["bisect"] = {{"good", run.bisect->good},
                     {"bad", run.bisect->bad},
                     {"probes", run.bisect->probes.size()},
                     {"result", std::move(result)}};
  }
  if (run.notification) {
    doc["notification"] = (fs::path("notify") / run.notification->filename()).generic_string();
  }
  if (run.quality) doc["quality"] = {{"gate", to_string(run.quality->gate)}};
  if (run.scan) {
    doc["scan"] = {{"added", run.scan->added.size()},
                   {"removed", run.scan->removed.size()},
                   {"modified", run.scan->modified.size()},
                   {"unmapped_new", run.unmapped_new_files}};
  }
  return doc.dump(2) + "\n";
}

std::string scan_report_json(const PipelineRun& run) {
  const ScanDelta delta = run.scan.value_or(ScanDelta{});
  const json doc = {{"run_id", run.run_id},
                    {"added", delta.added},
                    {"removed", delta.removed},
                    {"modified", delta.modified},
                    {"unchanged", delta.unchanged.size()},
                    {"unmapped_new", run.unmapped_new_files}};
  return doc.dump(2) + "\n";
}

// --- watch ------------------------------------------------------------------------------

void interruptible_sleep(std::chrono::milliseconds d, const std::atomic<bool>& stop) {
  const auto until = std::chrono::steady_clock::now() + d;
  while (!stop.load() && std::chrono::steady_clock::now() < until) {
    const auto left = until - std::chrono::steady_clock::now();
    std::this_thread::sleep_for(std::min<std::chrono::steady_clock::duration>(
        left, std::chrono::milliseconds(50)));
  }
}

Watcher::Watcher(const PipelineConfig& config, VcsAdapter& vcs, Runner& runner, const Clock& clock,
                 std::ostream* log)
    : config_(config), vcs_(vcs), runner_(runner), clock_(clock), log_(log),
      sleeper_(interruptible_sleep) {
  state_ = load_state(config_.paths.state);
}

void Watcher::say(const std::string& line) {
  if (log_ != nullptr) *log_ << line << '\n' << std::flush;
}

Watcher::StepResult Watcher::step() {
  StepResult out;
  db_ = load_database(config_.paths.db);
  for (const auto& s : config_.suites) {
    if (db_.find_suite(s.id) == nullptr) db_.add_suite(s);
  }
  const PipelineContext ctx{config_, vcs_, runner_, clock_};

  const CommitJournal journal = vcs_.history();
  std::size_t start = 0;
  if (state_.last_seen) start = journal.require_index(*state_.last_seen) + 1;
  std::vector<ChangeSet> fresh(journal.commits().begin() + static_cast<std::ptrdiff_t>(start),
                               journal.commits().end());
  std::vector<std::vector<ChangeSet>> batches;
  if (config_.trigger == TriggerMode::kCommit) {
    for (auto& c : fresh) batches.push_back({std::move(c)});
  } else if (!fresh.empty()) {
    batches.push_back(std::move(fresh));
  }
  for (const auto& batch : batches) {
    PipelineRun run = on_commits(batch, journal, db_, state_, ctx, Trigger::kCommit);
    save_state(state_, config_.paths.state);
    std::string msg = run.run_id + ": " + std::to_string(batch.size()) + " commit(s) up to " +
                      batch.back().id + " -> " + std::string(to_string(run.overall));
    if (run.bisect && run.bisect->result.kind == BisectState::Kind::kFound) {
      msg += ", culprit " + run.bisect->result.found;
    }
    say(msg);
    out.runs.push_back(std::move(run));
  }

  const auto now = clock_.now_seconds();
  const auto interval = std::chrono::duration<double, std::ratio<3600>>(config_.scan_interval_hours);
  if (!state_.last_scan) {
    state_.last_scan = now;
    save_state(state_, config_.paths.state);
  } else if (now - *state_.last_scan >= interval) {
    std::vector<fs::path> exclude = {config_.paths.outdir, config_.paths.db.parent_path(),
                                     config_.paths.state.parent_path()};
    const auto listing = scan_directory(config_.paths.repo, exclude);
    ScanOutcome scan = scheduled_scan(db_, listing, state_, ctx);
    if (!scan.delta.empty()) write_file_atomic(config_.paths.db, save(scan.db));
    db_ = std::move(scan.db);
    save_state(state_, config_.paths.state);
    say(scan.run.run_id + ": scan, " + scan.run.stages.front().message);
    out.scan = std::move(scan.run);
  }
  return out;
}

void Watcher::run(const std::atomic<bool>& stop, std::optional<std::size_t> max_iterations) {
  std::size_t iterations = 0;
  int failures = 0;
  while (!stop.load()) {
    std::chrono::milliseconds pause(static_cast<long long>(config_.poll_interval_seconds * 1000));
    try {
      step();
      failures = 0;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kTransientIo) throw;
      ++failures;
      pause = std::chrono::milliseconds(std::min(60'000LL, 1000LL << std::min(failures - 1, 6)));
      say(std::string("transient error, retrying in ") + std::to_string(pause.count() / 1000) +
          " s: " + e.what());
    }
    if (max_iterations && ++iterations >= *max_iterations) break;
    sleeper_(pause, stop);
  }
}

}  // namespace fastfail
