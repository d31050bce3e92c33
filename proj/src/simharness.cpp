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

#include "fastfail/simharness.hpp"

#include <algorithm>
#include <memory>
#include <random>
#include <sstream>

#include "fastfail/coverage.hpp"
#include "fastfail/error.hpp"
#include "json.hpp"

namespace fastfail::sim {

namespace {

constexpr long long kEpoch = 1'700'000'000;

std::string padded(std::size_t n, std::size_t width) {
  std::string s = std::to_string(n);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::size_t digits(std::size_t n) { return std::to_string(n).size(); }

std::set<std::string> suites_touched(const std::vector<std::string>& paths,
                                     const std::map<std::string, std::set<std::string>>& by_file) {
  std::set<std::string> out;
  for (const auto& p : paths) {
    auto it = by_file.find(p);
    if (it != by_file.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace

bool Scenario::suite_fails(const std::string& suite_id, const std::string& commit) const {
  if (!culprit) return false;
  const auto idx = journal.index_of(commit);
  if (!idx || *idx < journal.require_index(*culprit)) return false;
  auto it = files_of_suite.find(suite_id);
  if (it == files_of_suite.end()) return false;
  for (const auto& ch : journal.at(*culprit).changes) {
    if (it->second.count(ch.path)) return true;
  }
  return false;
}

std::vector<std::string> Scenario::failing_suites(const std::string& commit) const {
  std::vector<std::string> out;
  for (const auto& s : suites) {
    if (suite_fails(s.id, commit)) out.push_back(s.id);
  }
  return out;
}

std::map<std::string, double> Scenario::durations() const {
  std::map<std::string, double> out;
  for (const auto& s : suites) out[s.id] = spec.suite_duration_seconds;
  return out;
}

Scenario generate(const ScenarioSpec& spec) {
  if (spec.n_files == 0 || spec.n_suites == 0 || spec.n_commits == 0) {
    throw Error(ErrorKind::kValidation, "scenario needs at least one file, suite and commit");
  }
  if (!(spec.edge_density >= 0.0 && spec.edge_density <= 1.0)) {
    throw Error(ErrorKind::kValidation, "edge_density must lie in [0, 1]");
  }
  if (spec.regression_commit_index && *spec.regression_commit_index >= spec.n_commits) {
    throw Error(ErrorKind::kValidation, "regression index must be below n_commits");
  }
  if (spec.max_files_per_commit == 0 || !(spec.suite_duration_seconds > 0)) {
    throw Error(ErrorKind::kValidation, "max_files_per_commit and suite duration must be positive");
  }

  std::mt19937_64 rng(spec.seed);
  Scenario sc;
  sc.spec = spec;

  const std::size_t modules = std::max<std::size_t>(1, spec.n_files / 8);
  const std::size_t fw = std::max<std::size_t>(4, digits(spec.n_files));
  for (std::size_t i = 0; i < spec.n_files; ++i) {
    sc.files.push_back("src/main/java/com/sim/m" + std::to_string(i % modules) + "/F" +
                       padded(i, fw) + ".java");
  }
  std::sort(sc.files.begin(), sc.files.end());

  const std::size_t sw = std::max<std::size_t>(3, digits(spec.n_suites));
  for (std::size_t j = 0; j < spec.n_suites; ++j) {
    TestSuiteRecord s;
    s.id = "S" + padded(j, sw);
    s.kind = j % 2 == 0 ? SuiteKind::kFunctional : SuiteKind::kUnit;
    s.command = {"sim-suite", s.id};
    sc.suites.push_back(std::move(s));
  }

  std::bernoulli_distribution edge(spec.edge_density);
  std::map<std::string, std::set<std::string>> suites_of_file;
  for (const auto& s : sc.suites) {
    for (const auto& f : sc.files) {
      if (edge(rng)) {
        sc.true_mapping.emplace(s.id, f);
        sc.files_of_suite[s.id].insert(f);
        suites_of_file[f].insert(s.id);
      }
    }
  }

  static const std::vector<std::string> kAuthors = {
      "alice@example.com", "bob@example.com", "carol@example.com", "dave@example.com",
      "erin@example.com"};
  std::uniform_int_distribution<std::size_t> pick_author(0, kAuthors.size() - 1);
  const std::size_t max_k = std::min(spec.max_files_per_commit, spec.n_files);
  std::uniform_int_distribution<std::size_t> pick_k(1, max_k);
  constexpr int kAttempts = 10000;

  std::vector<ChangeSet> commits;
  for (std::size_t idx = 0; idx < spec.n_commits; ++idx) {
    ChangeSet c;
    c.id = "c" + std::to_string(idx);
    if (idx > 0) c.parent = commits.back().id;
    c.author = kAuthors[pick_author(rng)];
    c.timestamp = from_unix_seconds(kEpoch + static_cast<long long>(idx) * 60);
    const bool is_culprit = spec.regression_commit_index == idx;
    if (idx == 0) {
      for (const auto& f : sc.files) c.changes.push_back({f, ChangeType::kAdded, {}});
      if (is_culprit && suites_of_file.empty()) {
        throw Error(ErrorKind::kValidation, "culprit commit touches no mapped file");
      }
    } else {
      std::vector<std::string> chosen;
      bool ok = false;
      for (int attempt = 0; attempt < kAttempts && !ok; ++attempt) {
        std::vector<std::string> pool = sc.files;
        const std::size_t k = pick_k(rng);
        for (std::size_t m = 0; m < k; ++m) {
          std::uniform_int_distribution<std::size_t> d(m, pool.size() - 1);
          std::swap(pool[m], pool[d(rng)]);
        }
        chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        const std::size_t hit = suites_touched(chosen, suites_of_file).size();
        ok = true;
        if (spec.impact_range) {
          ok = hit >= spec.impact_range->first && hit <= spec.impact_range->second;
        }
        if (is_culprit && hit == 0) ok = false;
      }
      if (!ok) {
        throw Error(ErrorKind::kValidation,
                    "could not draw a change set for commit " + c.id + " meeting the constraints");
      }
      std::sort(chosen.begin(), chosen.end());
      for (auto& f : chosen) c.changes.push_back({std::move(f), ChangeType::kModified, {}});
    }
    if (is_culprit) sc.culprit = c.id;
    commits.push_back(std::move(c));
  }
  sc.journal = CommitJournal(std::move(commits));
  sc.head_tree = materialize(sc.journal, sc.journal.head().id);
  return sc;
}

std::vector<CoverageRecord> coverage_records(const Scenario& scenario, const std::string& run_id) {
  std::vector<CoverageRecord> out;
  for (const auto& s : scenario.suites) {
    CoverageRecord rec;
    rec.suite_id = s.id;
    rec.run_id = run_id;
    auto it = scenario.files_of_suite.find(s.id);
    if (it != scenario.files_of_suite.end()) {
      for (const auto& path : it->second) {
        CoveredFile cf;
        cf.path = path;
        for (int line = 1; line <= 5; ++line) cf.lines.push_back({line, 1});
        cf.hit_lines = 5;
        rec.covered.push_back(std::move(cf));
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ListingEntry> listing(const Scenario& scenario) {
  std::vector<ListingEntry> out;
  for (const auto& [path, version] : scenario.head_tree) {
    out.push_back({path, sha256_hex(source_text(path, version))});
  }
  return out;
}

MapperDatabase build_database(const Scenario& scenario) {
  IngestOptions options;
  options.now = from_unix_seconds(kEpoch);
  return bootstrap(coverage_records(scenario), listing(scenario), scenario.suites, options);
}

FunctionRunner make_runner(const Scenario& scenario) {
  auto sc = std::make_shared<const Scenario>(scenario);
  return FunctionRunner([sc](const RunRequest& req) {
    RunOutcome out;
    const bool known_suite = std::any_of(sc->suites.begin(), sc->suites.end(),
                                         [&](const TestSuiteRecord& s) { return s.id == req.suite_id; });
    if (!known_suite || !sc->journal.index_of(req.commit)) {
      out.exit_code = 2;
      out.output = "unknown suite or commit\n";
      return out;
    }
    const bool fails = sc->suite_fails(req.suite_id, req.commit);
    out.exit_code = fails ? 1 : 0;
    out.output = std::string(fails ? "FAIL " : "PASS ") + req.suite_id + " at " + req.commit + "\n";
    return out;
  });
}

std::set<std::string> oracle_select(const Scenario& scenario, const std::set<std::string>& changed) {
  std::set<std::string> out;
  for (const auto& [suite, files] : scenario.files_of_suite) {
    for (const auto& p : changed) {
      if (files.count(p)) {
        out.insert(suite);
        break;
      }
    }
  }
  return out;
}

std::optional<std::string> oracle_bisect(const Scenario& scenario) {
  for (const auto& c : scenario.journal.commits()) {
    for (const auto& s : scenario.suites) {
      if (scenario.suite_fails(s.id, c.id)) return c.id;
    }
  }
  return std::nullopt;
}

std::string source_text(const std::string& path, const std::string& version) {
  const std::string stem = std::filesystem::path(path).stem().string();
  const std::string pkg = std::filesystem::path(path).parent_path().filename().string();
  const unsigned long salt = std::stoul(sha256_hex(path + "@" + version).substr(0, 6), nullptr, 16);
  std::ostringstream out;
  out << "// " << path << " at " << version << "\n"
      << "package com.sim." << pkg << ";\n\n"
      << "public class " << stem << " {\n"
      << "    private int counter = 0;\n\n"
      << "    /* Advances the counter by a positive step. */\n"
      << "    public int step(int x) {\n"
      << "        if (x > 0 && counter < " << (salt % 97 + 3) << ") {\n"
      << "            counter += x;\n"
      << "        }\n"
      << "        return counter + " << salt % 1000 << ";\n"
      << "    }\n"
      << "}\n";
  return out.str();
}

void materialize_scenario(const Scenario& scenario, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  const fs::path out = fs::absolute(out_dir);
  fs::create_directories(out);
  write_file_atomic(out / "journal.txt", render_journal(scenario.journal));
  for (const auto& [path, version] : scenario.head_tree) {
    write_file_atomic(out / "repo" / path, source_text(path, version));
  }
  for (const auto& rec : coverage_records(scenario)) {
    write_file_atomic(out / "coverage" / (rec.suite_id + ".xml"), render_cobertura(rec));
  }
  for (const auto& s : scenario.suites) {
    std::string lines;
    for (const auto& c : scenario.journal.commits()) {
      if (scenario.suite_fails(s.id, c.id)) lines += c.id + "\n";
    }
    write_file_atomic(out / "expect" / (s.id + ".fail"), lines);
  }
  write_file_atomic(out / "suites" / "run.sh",
                    "#!/bin/sh\n"
                    "# usage: run.sh <suite>; fails when $FASTFAIL_COMMIT is listed for it\n"
                    "dir=$(dirname \"$0\")/..\n"
                    "if grep -qx \"$FASTFAIL_COMMIT\" \"$dir/expect/$1.fail\" 2>/dev/null; then\n"
                    "  echo \"FAIL $1 at $FASTFAIL_COMMIT\"\n"
                    "  exit 1\n"
                    "fi\n"
                    "echo \"PASS $1 at $FASTFAIL_COMMIT\"\n"
                    "exit 0\n");

  nlohmann::json suites = nlohmann::json::array();
  for (const auto& s : scenario.suites) {
    suites.push_back({{"id", s.id},
                      {"kind", to_string(s.kind)},
                      {"command", {"sh", (out / "suites" / "run.sh").string(), s.id}}});
  }
  nlohmann::json config = {
      {"scan_interval_hours", 6},
      {"auto_bisect", true},
      {"fallback_policy", "full"},
      {"max_parallel", 4},
      {"retry_flaky", false},
      {"timeout_seconds", 60},
      {"manager_address", "qa-lead@example.com"},
      {"trigger", "batch"},
      {"poll_interval_seconds", 1},
      {"default_duration_s", scenario.spec.suite_duration_seconds},
      {"paths",
       {{"repo", "repo"},
        {"db", "state/mapper.json"},
        {"state", "state/pipeline-state.json"},
        {"outdir", "out"},
        {"journal", "journal.txt"},
        {"coverage", "coverage"}}},
      {"suites", std::move(suites)},
  };
  write_file_atomic(out / "config.json", config.dump(2) + "\n");
}

}  // namespace fastfail::sim
