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

#ifndef FASTFAIL_COVERAGE_HPP_
#define FASTFAIL_COVERAGE_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fastfail/mapper.hpp"

namespace fastfail {

/// Reads the Cobertura subset we care about: every `<class filename=..>`
/// and its `<line number=.. hits=..>` children. Classes sharing a filename
/// (inner classes) are merged. Throws kParse.
CoverageRecord parse_cobertura(std::string_view xml, std::string suite_id,
                               std::string run_id);

/// Plain-text fallback: one `suite_id<TAB>path<TAB>hits` per line. A suite
/// column of the form `suite::case` attributes the line to a test case.
/// Returns one record per (suite, case) in first-seen order.
std::vector<CoverageRecord> parse_coverage_text(std::string_view text,
                                                const std::string& run_id);

/// Splits `suite::case` into its parts; case is empty when absent.
std::pair<std::string, std::string> split_case_ref(std::string_view ref);

std::string render_cobertura(const CoverageRecord& record);

/// Loads every `*.xml` (suite id = file stem, `suite::case` allowed) and
/// every `*.tsv` / `*.cov` file under `dir`, sorted by file name.
std::vector<CoverageRecord> load_coverage_dir(const std::filesystem::path& dir,
                                              const std::string& run_id);

}  // namespace fastfail

#endif  // FASTFAIL_COVERAGE_HPP_
