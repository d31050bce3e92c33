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

#ifndef FASTFAIL_QUALITY_HPP_
#define FASTFAIL_QUALITY_HPP_

/// @file quality.hpp
///
/// Token-level code quality: function complexity, clone detection, lexical
/// security rules and the seven-axis report with its Red/Yellow/Green gate.
///
/// The seven axes are duplication density, comment density, cyclomatic
/// complexity, rule compliance, potential bugs, unit test coverage and unit
/// test success.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastfail/execution.hpp"
#include "fastfail/lexer.hpp"
#include "fastfail/mapper.hpp"

namespace fastfail {

struct FunctionSpan {
  std::string name;
  int start_line = 1;
  int end_line = 1;
  // Token index range [first_token, last_token] into TokenizedFile::tokens.
  std::size_t first_token = 0;
  std::size_t last_token = 0;
};

/// Brace-matching heuristic: `name ( ... ) [qualifiers] { ... }` where name
/// is an identifier. Nested matches inside a span are folded into it. A
/// file with no braces at all is reported as one file-level span.
std::vector<FunctionSpan> find_functions(const TokenizedFile& file);

/// 1 + branch points: keywords if/for/while/case/catch/elif and the
/// operators &&, ||, ?.
int cyclomatic_complexity(std::span<const Token> tokens);
int cyclomatic_complexity(const TokenizedFile& file, const FunctionSpan& span);

struct DuplicateBlock {
  std::string path_a;
  std::size_t start_a = 0;  // index into the file's code-token stream
  int first_line_a = 0;
  int last_line_a = 0;
  std::string path_b;
  std::size_t start_b = 0;
  int first_line_b = 0;
  int last_line_b = 0;
  std::size_t length = 0;  // tokens

  bool operator==(const DuplicateBlock&) const = default;
};

struct DuplicationReport {
  std::vector<DuplicateBlock> blocks;
  std::size_t duplicated_lines = 0;
  std::size_t code_lines = 0;
  double density = 0;  // percent
};

/// Comparison form of a token for clone detection: identifiers and
/// keywords by text, literals by kind. Comments are not code tokens.
std::string normalized_token(const Token& token);

/// Finds maximal pairs of identical normalized token runs of at least
/// `window` tokens. Throws kValidation when window < 2.
DuplicationReport duplication(std::span<const TokenizedFile> files, std::size_t window = 10);

enum class Severity { kBlocker, kCritical, kMajor, kMinor };
std::string_view to_string(Severity s);

struct RuleInfo {
  std::string id;
  std::string name;
  Severity severity;
  std::string description;
};

/// R0 invalid-utf8, R1 sql-concat, R2 hardcoded-credential, R3 empty-catch,
/// R4 sensitive-logging, R5 raw-object-reference.
const std::vector<RuleInfo>& registered_rules();

struct RuleViolation {
  std::string rule_id;
  std::string path;
  int line = 0;
  Severity severity = Severity::kMinor;
  std::string message;

  bool operator==(const RuleViolation&) const = default;
};

/// Rule id -> enabled. Ids not mentioned are enabled.
using RuleConfig = std::map<std::string, bool>;

/// Throws kConfig for unknown rule ids. Output is ordered by
/// (path, line, rule_id) with at most one violation per such triple.
std::vector<RuleViolation> run_rules(std::span<const TokenizedFile> files,
                                     const RuleConfig& config = {});

enum class Gate { kGreen, kYellow, kRed };
std::string_view to_string(Gate g);

/// Cutoffs for one axis. For higher-is-better axes a value below `red` is
/// Red and below `yellow` is Yellow; for lower-is-better axes the
/// comparisons flip.
struct AxisThreshold {
  double yellow = 0;
  double red = 0;
};

struct GateThresholds {
  std::optional<AxisThreshold> coverage;         // higher is better
  std::optional<AxisThreshold> duplication;      // lower is better
  std::optional<AxisThreshold> max_complexity;   // lower is better
  std::optional<AxisThreshold> comment_density;  // higher is better
  std::optional<AxisThreshold> rule_compliance;  // higher is better
  std::optional<AxisThreshold> potential_bugs;   // lower is better
  std::optional<AxisThreshold> test_success;     // higher is better

  /// coverage 80/50, duplication 10/20, max complexity 10/20.
  static GateThresholds defaults();
  /// Throws kConfig when a yellow cutoff is stricter than its red cutoff.
  void validate() const;
};

struct ComplexityAxis {
  double mean = 0;
  int max = 0;
  std::size_t functions = 0;
};

struct QualityReport {
  double duplication_density = 0;
  double comment_density = 0;
  ComplexityAxis complexity;
  double rule_compliance = 100;
  std::size_t potential_bugs = 0;
  double unit_test_coverage = 0;
  double unit_test_success = 100;
  Gate gate = Gate::kGreen;
  std::vector<RuleViolation> violations;
  std::vector<DuplicateBlock> duplicate_blocks;
  std::vector<std::string> warnings;
};

/// Per-axis verdicts (axes without a threshold are Green).
std::map<std::string, Gate> axis_gates(const QualityReport& report, const GateThresholds& t);

/// Red on any Red axis or any Blocker violation, else Yellow on any Yellow
/// axis, else Green.
Gate evaluate_gate(const QualityReport& report, const GateThresholds& thresholds);

struct QualityOptions {
  RuleConfig rules;
  GateThresholds thresholds = GateThresholds::defaults();
  std::size_t duplication_window = 10;
};

/// Throws kDegenerate when `files` is empty.
QualityReport seven_axes(std::span<const TokenizedFile> files,
                         const std::vector<CoverageRecord>& coverage, const RunReport& run,
                         const QualityOptions& options);

std::string quality_report_json(const QualityReport& report);
std::string quality_dashboard_html(const QualityReport& report, const GateThresholds& thresholds);

}  // namespace fastfail

#endif  // FASTFAIL_QUALITY_HPP_
