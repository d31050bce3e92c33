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

#include "fastfail/selection.hpp"

#include <algorithm>

#include "fastfail/coverage.hpp"
#include "fastfail/error.hpp"
#include "json.hpp"

namespace fastfail {

std::string_view to_string(Fallback f) {
  return f == Fallback::kFullRegression ? "full" : "none";
}

FallbackPolicy fallback_policy_from_string(std::string_view s) {
  if (s == "full" || s == "full_regression") return FallbackPolicy::kFullRegression;
  if (s == "warn" || s == "warn_only") return FallbackPolicy::kWarnOnly;
  throw Error(ErrorKind::kConfig, "unknown fallback policy '" + std::string(s) + "'");
}

namespace {

struct Impact {
  std::set<std::string> changed_paths;
  std::set<std::string> unmapped;
  std::set<EdgeKey> matched;
};

Impact analyze(const MapperDatabase& db, const NetChanges& changed,
               const ClassifierConfig& classifier) {
  Impact impact;
  for (const auto& [path, change] : changed) {
    std::vector<std::string> candidates = {change.path};
    if (change.type == ChangeType::kRenamed) candidates.push_back(change.old_path);

    bool any_code = false;
    bool any_edge = false;
    std::string first_code;
    for (const auto& p : candidates) {
      impact.changed_paths.insert(p);
      if (classify_path(p, classifier) != Classification::kCode) continue;
      if (!any_code) first_code = p;
      any_code = true;
      for (auto& key : db.edges_for_path(p)) {
        any_edge = true;
        impact.matched.insert(std::move(key));
      }
    }
    if (any_code && !any_edge) impact.unmapped.insert(first_code);
  }
  return impact;
}

std::vector<std::string> all_of_kind(const MapperDatabase& db, SuiteKind kind) {
  std::vector<std::string> out;
  for (const auto& [id, suite] : db.suites()) {
    if (suite.kind == kind) out.push_back(id);
  }
  return out;
}

std::vector<std::string> pick(const MapperDatabase& db, const Impact& impact, SuiteKind kind) {
  std::set<std::string> whole;
  std::map<std::string, std::set<std::string>> cases;
  for (const auto& key : impact.matched) {
    const TestSuiteRecord* suite = db.find_suite(key.suite_id);
    if (suite == nullptr || suite->kind != kind) continue;
    if (kind == SuiteKind::kUnit && !key.case_id.empty()) {
      cases[key.suite_id].insert(key.case_id);
    } else {
      whole.insert(key.suite_id);
    }
  }
  std::set<std::string> out(whole.begin(), whole.end());
  for (const auto& [suite, ids] : cases) {
    if (whole.count(suite)) continue;
    for (const auto& c : ids) out.insert(suite + std::string(kCaseSeparator) + c);
  }
  return {out.begin(), out.end()};
}

SelectionResult build(const MapperDatabase& db, const NetChanges& changed,
                      const SelectionPolicy& policy, bool functional, bool unit) {
  Impact impact = analyze(db, changed, policy.classifier);
  SelectionResult result;
  result.changed_paths = std::move(impact.changed_paths);
  result.unmapped_code_paths = impact.unmapped;
  const bool full = policy.fallback == FallbackPolicy::kFullRegression && !impact.unmapped.empty();
  result.fallback = full ? Fallback::kFullRegression : Fallback::kNone;
  if (functional) {
    result.selected_functional = full ? all_of_kind(db, SuiteKind::kFunctional)
                                      : pick(db, impact, SuiteKind::kFunctional);
  }
  if (unit) {
    result.selected_unit = full ? all_of_kind(db, SuiteKind::kUnit)
                                : pick(db, impact, SuiteKind::kUnit);
  }
  return result;
}

}  // namespace

SelectionResult select_functional(const MapperDatabase& db, const NetChanges& changed,
                                  const SelectionPolicy& policy) {
  return build(db, changed, policy, true, false);
}

SelectionResult select_unit(const MapperDatabase& db, const NetChanges& changed,
                            const SelectionPolicy& policy) {
  return build(db, changed, policy, false, true);
}

SelectionResult select_all(const MapperDatabase& db, const NetChanges& changed,
                           const SelectionPolicy& policy) {
  return build(db, changed, policy, true, true);
}

RoiEstimate estimate_savings(const SelectionResult& result, const MapperDatabase& db,
                             const std::map<std::string, double>& durations,
                             double default_duration_seconds) {
  auto duration_of = [&](const std::string& id) {
    auto it = durations.find(id);
    return it == durations.end() ? default_duration_seconds : it->second;
  };
  RoiEstimate roi;
  for (const auto& [id, _] : db.suites()) roi.full_seconds += duration_of(id);
  if (roi.full_seconds <= 0) {
    throw Error(ErrorKind::kDegenerate, "full regression has zero total duration");
  }
  if (result.fallback == Fallback::kFullRegression) {
    roi.selected_seconds = roi.full_seconds;
    roi.reduction_fraction = 0;
    return roi;
  }

  // Case selections cost a share of their suite, capped at the whole suite.
  std::map<std::string, double> per_suite;
  auto account = [&](const std::string& entry) {
    if (db.find_suite(entry) != nullptr) {
      per_suite[entry] = duration_of(entry);
      return;
    }
    auto [suite_id, case_id] = split_case_ref(entry);
    const TestSuiteRecord* suite = db.find_suite(suite_id);
    if (suite == nullptr) {
      per_suite[entry] = default_duration_seconds;
      return;
    }
    const double whole = duration_of(suite_id);
    const double share = whole / static_cast<double>(std::max<std::size_t>(1, suite->case_ids.size()));
    per_suite[suite_id] = std::min(whole, per_suite[suite_id] + share);
  };
  for (const auto& e : result.selected_functional) account(e);
  for (const auto& e : result.selected_unit) account(e);
  for (const auto& [_, secs] : per_suite) roi.selected_seconds += secs;

  roi.reduction_fraction =
      std::clamp(1.0 - roi.selected_seconds / roi.full_seconds, 0.0, 1.0);
  return roi;
}

std::string selection_report_json(const SelectionResult& result, const RoiEstimate& roi) {
  nlohmann::json doc = {
      {"changed", result.changed_paths},
      {"functional", result.selected_functional},
      {"unit", result.selected_unit},
      {"unmapped", result.unmapped_code_paths},
      {"fallback", to_string(result.fallback)},
      {"roi",
       {{"selected_s", roi.selected_seconds},
        {"full_s", roi.full_seconds},
        {"reduction", roi.reduction_fraction}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace fastfail
