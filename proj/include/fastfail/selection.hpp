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

#ifndef FASTFAIL_SELECTION_HPP_
#define FASTFAIL_SELECTION_HPP_

/// @file selection.hpp
///
/// Change-driven test selection. A changed Code file selects every suite
/// mapped to it; configuration and documentation changes select nothing.
/// A changed Code file with no mapping at all is a blind spot, handled by
/// the fallback policy.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fastfail/mapper.hpp"
#include "fastfail/vcs.hpp"

namespace fastfail {

enum class FallbackPolicy { kFullRegression, kWarnOnly };
enum class Fallback { kNone, kFullRegression };

std::string_view to_string(Fallback f);
FallbackPolicy fallback_policy_from_string(std::string_view s);

struct SelectionPolicy {
  FallbackPolicy fallback = FallbackPolicy::kFullRegression;
  ClassifierConfig classifier = ClassifierConfig::defaults();
};

/// Separator between suite and case in case-granular selections.
inline constexpr std::string_view kCaseSeparator = "::";

struct SelectionResult {
  std::set<std::string> changed_paths;
  std::vector<std::string> selected_functional;
  // Suite ids, or `suite::case` entries when selected at case granularity.
  std::vector<std::string> selected_unit;
  std::set<std::string> unmapped_code_paths;
  Fallback fallback = Fallback::kNone;

  bool empty() const { return selected_functional.empty() && selected_unit.empty(); }
  bool operator==(const SelectionResult&) const = default;
};

SelectionResult select_functional(const MapperDatabase& db, const NetChanges& changed,
                                  const SelectionPolicy& policy);
SelectionResult select_unit(const MapperDatabase& db, const NetChanges& changed,
                            const SelectionPolicy& policy);
/// Both flows merged into one result.
SelectionResult select_all(const MapperDatabase& db, const NetChanges& changed,
                           const SelectionPolicy& policy);

struct RoiEstimate {
  double selected_seconds = 0;
  double full_seconds = 0;
  double reduction_fraction = 0;
};

/// Throws kDegenerate when the full suite has zero total duration.
RoiEstimate estimate_savings(const SelectionResult& result, const MapperDatabase& db,
                             const std::map<std::string, double>& durations,
                             double default_duration_seconds = 60.0);

/// `{"changed":[...],"functional":[...],"unit":[...],"unmapped":[...],
///   "fallback":"none|full","roi":{...}}`
std::string selection_report_json(const SelectionResult& result, const RoiEstimate& roi);

}  // namespace fastfail

#endif  // FASTFAIL_SELECTION_HPP_
