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

#include "fastfail/quality.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "fastfail/error.hpp"
#include "json.hpp"

namespace fastfail {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::size_t> code_indices(const TokenizedFile& file) {
  std::vector<std::size_t> out;
  out.reserve(file.tokens.size());
  for (std::size_t i = 0; i < file.tokens.size(); ++i) {
    if (!file.tokens[i].is_comment()) out.push_back(i);
  }
  return out;
}

int last_line_of(const Token& t) {
  return t.line + static_cast<int>(std::count(t.text.begin(), t.text.end(), '\n'));
}

// Index (into `code`) of the bracket closing the one at `open`, or npos.
std::size_t match_bracket(const TokenizedFile& file, const std::vector<std::size_t>& code,
                          std::size_t open, std::string_view l, std::string_view r) {
  int depth = 0;
  for (std::size_t j = open; j < code.size(); ++j) {
    const Token& t = file.tokens[code[j]];
    if (t.kind != TokenKind::kPunct) continue;
    if (t.text == l) {
      ++depth;
    } else if (t.text == r && --depth == 0) {
      return j;
    }
  }
  return std::string::npos;
}

}  // namespace

// --- functions & complexity --------------------------------------------------------

std::vector<FunctionSpan> find_functions(const TokenizedFile& file) {
  const auto code = code_indices(file);
  std::vector<FunctionSpan> spans;
  if (code.empty()) return spans;
  const bool has_brace = std::any_of(code.begin(), code.end(), [&](std::size_t i) {
    return file.tokens[i].is(TokenKind::kPunct, "{");
  });
  if (!has_brace) {
    spans.push_back(FunctionSpan{file.path, file.tokens[code.front()].line,
                                 last_line_of(file.tokens[code.back()]), 0,
                                 file.tokens.size() - 1});
    return spans;
  }

  static const std::set<std::string_view> kQualifierPunct = {"::", ".", ",", "<", ">",
                                                             "&", "*", "->", "[", "]"};
  std::size_t j = 0;
  while (j + 1 < code.size()) {
    const Token& name = file.tokens[code[j]];
    if (name.kind != TokenKind::kIdentifier ||
        !file.tokens[code[j + 1]].is(TokenKind::kPunct, "(")) {
      ++j;
      continue;
    }
    const std::size_t close = match_bracket(file, code, j + 1, "(", ")");
    if (close == std::string::npos) break;
    std::size_t m = close + 1;
    std::size_t budget = 16;
    while (m < code.size() && budget-- > 0) {
      const Token& t = file.tokens[code[m]];
      const bool qualifier = (t.kind == TokenKind::kIdentifier || t.kind == TokenKind::kKeyword) ||
                             (t.kind == TokenKind::kPunct && kQualifierPunct.count(t.text));
      if (!qualifier) break;
      ++m;
    }
    if (m < code.size() && file.tokens[code[m]].is(TokenKind::kPunct, "{")) {
      const std::size_t end = match_bracket(file, code, m, "{", "}");
      if (end == std::string::npos) break;
      spans.push_back(FunctionSpan{name.text, name.line, file.tokens[code[end]].line, code[j],
                                   code[end]});
      j = end + 1;
      continue;
    }
    ++j;
  }
  return spans;
}

int cyclomatic_complexity(std::span<const Token> tokens) {
  int cc = 1;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::kKeyword) {
      if (t.text == "if" || t.text == "for" || t.text == "while" || t.text == "case" ||
          t.text == "catch" || t.text == "elif") {
        ++cc;
      }
    } else if (t.kind == TokenKind::kPunct) {
      if (t.text == "&&" || t.text == "||" || t.text == "?") ++cc;
    }
  }
  return cc;
}

int cyclomatic_complexity(const TokenizedFile& file, const FunctionSpan& span) {
  if (file.tokens.empty()) return 1;
  const std::size_t last = std::min(span.last_token, file.tokens.size() - 1);
  return cyclomatic_complexity(
      std::span<const Token>(file.tokens).subspan(span.first_token, last - span.first_token + 1));
}

// --- duplication -------------------------------------------------------------------

std::string normalized_token(const Token& token) {
  switch (token.kind) {
    case TokenKind::kNumberLiteral: return "$num";
    case TokenKind::kStringLiteral: return "$str";
    default: return token.text;
  }
}

DuplicationReport duplication(std::span<const TokenizedFile> files, std::size_t window) {
  if (window < 2) throw Error(ErrorKind::kValidation, "duplication window must be >= 2");

  struct Stream {
    const TokenizedFile* file;
    std::vector<int> ids;
    std::vector<int> lines;
  };
  std::vector<const TokenizedFile*> order;
  for (const auto& f : files) order.push_back(&f);
  std::sort(order.begin(), order.end(),
            [](const TokenizedFile* a, const TokenizedFile* b) { return a->path < b->path; });

  std::unordered_map<std::string, int> intern;
  std::vector<Stream> streams;
  DuplicationReport report;
  for (const TokenizedFile* f : order) {
    Stream s{f, {}, {}};
    std::set<int> code_lines;
    for (const Token& t : f->tokens) {
      if (t.is_comment()) continue;
      auto [it, _] = intern.emplace(normalized_token(t), static_cast<int>(intern.size()));
      s.ids.push_back(it->second);
      s.lines.push_back(t.line);
      code_lines.insert(t.line);
    }
    report.code_lines += code_lines.size();
    streams.push_back(std::move(s));
  }

  struct Loc {
    std::size_t stream;
    std::size_t pos;
  };
  std::unordered_map<std::uint64_t, std::vector<Loc>> buckets;
  constexpr std::uint64_t kBase = 1000003ULL;
  std::uint64_t top = 1;  // kBase^(window-1)
  for (std::size_t k = 1; k < window; ++k) top *= kBase;
  for (std::size_t si = 0; si < streams.size(); ++si) {
    const auto& ids = streams[si].ids;
    if (ids.size() < window) continue;
    std::uint64_t h = 0;
    for (std::size_t k = 0; k < window; ++k) h = h * kBase + static_cast<std::uint64_t>(ids[k] + 1);
    buckets[h].push_back({si, 0});
    for (std::size_t p = 1; p + window <= ids.size(); ++p) {
      h -= top * static_cast<std::uint64_t>(ids[p - 1] + 1);
      h = h * kBase + static_cast<std::uint64_t>(ids[p + window - 1] + 1);
      buckets[h].push_back({si, p});
    }
  }

  auto same_window = [&](const Loc& a, const Loc& b) {
    const auto& x = streams[a.stream].ids;
    const auto& y = streams[b.stream].ids;
    return std::equal(x.begin() + static_cast<std::ptrdiff_t>(a.pos),
                      x.begin() + static_cast<std::ptrdiff_t>(a.pos + window),
                      y.begin() + static_cast<std::ptrdiff_t>(b.pos));
  };

  std::vector<std::vector<int>> cover(streams.size());
  for (std::size_t si = 0; si < streams.size(); ++si) cover[si].assign(streams[si].ids.size() + 1, 0);

  for (auto& [_, locs] : buckets) {
    if (locs.size() < 2) continue;
    // Split hash collisions into exact-equality classes.
    std::vector<std::vector<Loc>> classes;
    for (const Loc& loc : locs) {
      auto cls = std::find_if(classes.begin(), classes.end(),
                              [&](const std::vector<Loc>& c) { return same_window(c.front(), loc); });
      if (cls == classes.end()) {
        classes.push_back({loc});
      } else {
        cls->push_back(loc);
      }
    }
    for (auto& cls : classes) {
      if (cls.size() < 2) continue;
      std::sort(cls.begin(), cls.end(), [](const Loc& a, const Loc& b) {
        return std::tie(a.stream, a.pos) < std::tie(b.stream, b.pos);
      });
      for (const Loc& loc : cls) {
        ++cover[loc.stream][loc.pos];
        --cover[loc.stream][loc.pos + window];
      }
      // Highly repetitive code yields huge classes; beyond this size only
      // neighbouring occurrences are paired so the block list stays linear.
      constexpr std::size_t kAllPairsLimit = 64;
      auto emit = [&](const Loc& a, const Loc& b) {
        const auto& x = streams[a.stream];
        const auto& y = streams[b.stream];
        if (a.pos > 0 && b.pos > 0 && x.ids[a.pos - 1] == y.ids[b.pos - 1]) return;
        std::size_t len = window;
        while (a.pos + len < x.ids.size() && b.pos + len < y.ids.size() &&
               x.ids[a.pos + len] == y.ids[b.pos + len]) {
          ++len;
        }
        report.blocks.push_back(DuplicateBlock{
            x.file->path, a.pos, x.lines[a.pos], x.lines[a.pos + len - 1], y.file->path, b.pos,
            y.lines[b.pos], y.lines[b.pos + len - 1], len});
      };
      if (cls.size() <= kAllPairsLimit) {
        for (std::size_t i = 0; i < cls.size(); ++i) {
          for (std::size_t k = i + 1; k < cls.size(); ++k) emit(cls[i], cls[k]);
        }
      } else {
        for (std::size_t i = 0; i + 1 < cls.size(); ++i) emit(cls[i], cls[i + 1]);
      }
    }
  }

  for (std::size_t si = 0; si < streams.size(); ++si) {
    std::set<int> dup_lines;
    int running = 0;
    for (std::size_t p = 0; p < streams[si].ids.size(); ++p) {
      running += cover[si][p];
      if (running > 0) dup_lines.insert(streams[si].lines[p]);
    }
    report.duplicated_lines += dup_lines.size();
  }
  std::sort(report.blocks.begin(), report.blocks.end(), [](const auto& a, const auto& b) {
    return std::tie(a.path_a, a.start_a, a.path_b, a.start_b) <
           std::tie(b.path_a, b.start_a, b.path_b, b.start_b);
  });
  report.density = report.code_lines == 0
                       ? 0.0
                       : 100.0 * static_cast<double>(report.duplicated_lines) /
                             static_cast<double>(report.code_lines);
  return report;
}

// --- rules -------------------------------------------------------------------------

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kBlocker: return "blocker";
    case Severity::kCritical: return "critical";
    case Severity::kMajor: return "major";
    case Severity::kMinor: return "minor";
  }
  return "minor";
}

const std::vector<RuleInfo>& registered_rules() {
  static const std::vector<RuleInfo> kRules = {
      {"R0", "invalid-utf8", Severity::kMinor, "source contains bytes that are not valid UTF-8"},
      {"R1", "sql-concat", Severity::kBlocker,
       "SQL statement text concatenated with a variable (SQL injection)"},
      {"R2", "hardcoded-credential", Severity::kCritical,
       "credential-like name assigned a string literal"},
      {"R3", "empty-catch", Severity::kMajor, "catch block swallows the error silently"},
      {"R4", "sensitive-logging", Severity::kMajor, "credential-like value passed to a logger"},
      {"R5", "raw-object-reference", Severity::kMinor,
       "numeric id concatenated into a URL (direct object reference)"},
  };
  return kRules;
}

namespace {

bool credential_name(std::string_view name) {
  const std::string n = lower(name);
  for (std::string_view k : {"password", "passwd", "pwd", "secret", "token"}) {
    if (n.find(k) != std::string::npos) return true;
  }
  return false;
}

std::string_view literal_body(const Token& t) {
  std::string_view s = t.text;
  const std::size_t q = (s.size() >= 6 && (s.substr(0, 3) == "\"\"\"" || s.substr(0, 3) == "'''")) ? 3 : 1;
  if (s.size() < 2 * q) return {};
  return s.substr(q, s.size() - 2 * q);
}

bool has_sql_keyword(const Token& t) {
  std::string body(literal_body(t));
  for (char& c : body) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (std::string_view kw : {"SELECT", "INSERT", "UPDATE", "DELETE"}) {
    for (std::size_t pos = body.find(kw); pos != std::string::npos; pos = body.find(kw, pos + 1)) {
      const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(body[pos - 1]));
      const std::size_t end = pos + kw.size();
      const bool right = end == body.size() || !std::isalnum(static_cast<unsigned char>(body[end]));
      if (left && right) return true;
    }
  }
  return false;
}

bool url_like(const Token& t) {
  const auto body = literal_body(t);
  return body.find("://") != std::string_view::npos || (!body.empty() && body.front() == '/');
}

bool id_like(const Token& t) {
  if (t.kind == TokenKind::kNumberLiteral) return true;
  if (t.kind != TokenKind::kIdentifier) return false;
  const std::string_view n = t.text;
  auto ends = [&](std::string_view suf) {
    return n.size() >= suf.size() && n.substr(n.size() - suf.size()) == suf;
  };
  return lower(n) == "id" || ends("Id") || ends("ID") || ends("_id");
}

class RuleContext {
 public:
  RuleContext(const TokenizedFile& file, std::vector<RuleViolation>& out)
      : file_(file), out_(out) {
    for (const Token& t : file.tokens) {
      if (!t.is_comment()) code_.push_back(&t);
    }
  }

  void invalid_utf8() {
    for (int line : file_.invalid_utf8_lines) {
      add("R0", line, Severity::kMinor, "invalid UTF-8 byte sequence replaced");
    }
  }

  void sql_concat() {
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Token& t = *code_[i];
      if (t.kind != TokenKind::kStringLiteral || !has_sql_keyword(t)) continue;
      const bool after = i + 2 < code_.size() && punct(i + 1, "+") &&
                         code_[i + 2]->kind == TokenKind::kIdentifier;
      const bool before = i >= 2 && punct(i - 1, "+") && code_[i - 2]->kind == TokenKind::kIdentifier;
      if (after || before) {
        add("R1", t.line, Severity::kBlocker, "SQL built by string concatenation");
      }
    }
  }

  void hardcoded_credential() {
    for (std::size_t i = 0; i + 2 < code_.size(); ++i) {
      const Token& name = *code_[i];
      if (name.kind != TokenKind::kIdentifier || !credential_name(name.text)) continue;
      if (!punct(i + 1, "=") && !punct(i + 1, ":")) continue;
      const Token& value = *code_[i + 2];
      if (value.kind == TokenKind::kStringLiteral && !literal_body(value).empty()) {
        add("R2", name.line, Severity::kCritical,
            "hard-coded credential assigned to '" + name.text + "'");
      }
    }
  }

  void empty_catch() {
    for (std::size_t i = 0; i < code_.size(); ++i) {
      if (!code_[i]->is(TokenKind::kKeyword, "catch")) continue;
      std::size_t j = i + 1;
      if (j < code_.size() && punct(j, "(")) {
        int depth = 0;
        for (; j < code_.size(); ++j) {
          if (punct(j, "(")) ++depth;
          if (punct(j, ")") && --depth == 0) break;
        }
        ++j;
      }
      if (j + 1 < code_.size() && punct(j, "{") && punct(j + 1, "}")) {
        add("R3", code_[i]->line, Severity::kMajor, "empty catch block");
      }
    }
  }

  void sensitive_logging() {
    for (std::size_t i = 1; i < code_.size(); ++i) {
      if (!punct(i, "(") || code_[i - 1]->kind != TokenKind::kIdentifier) continue;
      bool logger = false;
      for (std::size_t k = i - 1;; k -= 2) {
        if (lower(code_[k]->text).find("log") != std::string::npos) logger = true;
        if (k < 2 || code_[k - 2]->kind != TokenKind::kIdentifier ||
            !(punct(k - 1, ".") || punct(k - 1, "->") || punct(k - 1, "::"))) {
          break;
        }
      }
      if (!logger) continue;
      int depth = 0;
      for (std::size_t j = i; j < code_.size(); ++j) {
        if (punct(j, "(")) ++depth;
        if (punct(j, ")") && --depth == 0) break;
        if (code_[j]->kind == TokenKind::kIdentifier && credential_name(code_[j]->text)) {
          add("R4", code_[i - 1]->line, Severity::kMajor,
              "credential '" + code_[j]->text + "' written to a log");
          break;
        }
      }
    }
  }

  void raw_object_reference() {
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Token& t = *code_[i];
      if (t.kind != TokenKind::kStringLiteral || !url_like(t)) continue;
      const bool after = i + 2 < code_.size() && punct(i + 1, "+") && id_like(*code_[i + 2]);
      const bool before = i >= 2 && punct(i - 1, "+") && id_like(*code_[i - 2]);
      if (after || before) {
        add("R5", t.line, Severity::kMinor, "object id concatenated into a URL");
      }
    }
  }

 private:
  bool punct(std::size_t i, std::string_view text) const {
    return code_[i]->is(TokenKind::kPunct, text);
  }

  void add(const char* rule, int line, Severity sev, std::string message) {
    out_.push_back(RuleViolation{rule, file_.path, line, sev, std::move(message)});
  }

  const TokenizedFile& file_;
  std::vector<RuleViolation>& out_;
  std::vector<const Token*> code_;
};

std::set<std::string> enabled_rules(const RuleConfig& config) {
  std::set<std::string> known;
  for (const auto& r : registered_rules()) known.insert(r.id);
  for (const auto& [id, _] : config) {
    if (!known.count(id)) throw Error(ErrorKind::kConfig, "unknown rule id '" + id + "'");
  }
  std::set<std::string> enabled;
  for (const auto& id : known) {
    auto it = config.find(id);
    if (it == config.end() || it->second) enabled.insert(id);
  }
  return enabled;
}

}  // namespace

std::vector<RuleViolation> run_rules(std::span<const TokenizedFile> files, const RuleConfig& config) {
  const auto enabled = enabled_rules(config);
  std::vector<RuleViolation> out;
  for (const auto& file : files) {
    RuleContext ctx(file, out);
    if (enabled.count("R0")) ctx.invalid_utf8();
    if (enabled.count("R1")) ctx.sql_concat();
    if (enabled.count("R2")) ctx.hardcoded_credential();
    if (enabled.count("R3")) ctx.empty_catch();
    if (enabled.count("R4")) ctx.sensitive_logging();
    if (enabled.count("R5")) ctx.raw_object_reference();
  }
  std::sort(out.begin(), out.end(), [](const RuleViolation& a, const RuleViolation& b) {
    return std::tie(a.path, a.line, a.rule_id) < std::tie(b.path, b.line, b.rule_id);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const RuleViolation& a, const RuleViolation& b) {
                          return a.path == b.path && a.line == b.line && a.rule_id == b.rule_id;
                        }),
            out.end());
  return out;
}

// --- gate ----------------------------------------------------------------------------

std::string_view to_string(Gate g) {
  switch (g) {
    case Gate::kGreen: return "green";
    case Gate::kYellow: return "yellow";
    case Gate::kRed: return "red";
  }
  return "red";
}

GateThresholds GateThresholds::defaults() {
  GateThresholds t;
  t.coverage = AxisThreshold{80, 50};
  t.duplication = AxisThreshold{10, 20};
  t.max_complexity = AxisThreshold{10, 20};
  return t;
}

void GateThresholds::validate() const {
  auto higher = [](const std::optional<AxisThreshold>& t, const char* name) {
    if (t && t->yellow < t->red) {
      throw Error(ErrorKind::kConfig, std::string("gate threshold '") + name +
                                          "': yellow cutoff is stricter than red");
    }
  };
  auto lower_better = [](const std::optional<AxisThreshold>& t, const char* name) {
    if (t && t->yellow > t->red) {
      throw Error(ErrorKind::kConfig, std::string("gate threshold '") + name +
                                          "': yellow cutoff is stricter than red");
    }
  };
  higher(coverage, "coverage");
  lower_better(duplication, "duplication");
  lower_better(max_complexity, "max_complexity");
  higher(comment_density, "comment_density");
  higher(rule_compliance, "rule_compliance");
  lower_better(potential_bugs, "potential_bugs");
  higher(test_success, "test_success");
}

namespace {

Gate higher_is_better(double v, const std::optional<AxisThreshold>& t) {
  if (!t) return Gate::kGreen;
  if (v < t->red) return Gate::kRed;
  if (v < t->yellow) return Gate::kYellow;
  return Gate::kGreen;
}

Gate lower_is_better(double v, const std::optional<AxisThreshold>& t) {
  if (!t) return Gate::kGreen;
  if (v > t->red) return Gate::kRed;
  if (v > t->yellow) return Gate::kYellow;
  return Gate::kGreen;
}

}  // namespace

std::map<std::string, Gate> axis_gates(const QualityReport& r, const GateThresholds& t) {
  return {
      {"duplication", lower_is_better(r.duplication_density, t.duplication)},
      {"comments", higher_is_better(r.comment_density, t.comment_density)},
      {"complexity", lower_is_better(r.complexity.max, t.max_complexity)},
      {"rules", higher_is_better(r.rule_compliance, t.rule_compliance)},
      {"potential_bugs", lower_is_better(static_cast<double>(r.potential_bugs), t.potential_bugs)},
      {"coverage", higher_is_better(r.unit_test_coverage, t.coverage)},
      {"test_success", higher_is_better(r.unit_test_success, t.test_success)},
  };
}

Gate evaluate_gate(const QualityReport& report, const GateThresholds& thresholds) {
  thresholds.validate();
  const bool blocker = std::any_of(report.violations.begin(), report.violations.end(),
                                   [](const RuleViolation& v) { return v.severity == Severity::kBlocker; });
  Gate gate = blocker ? Gate::kRed : Gate::kGreen;
  for (const auto& [_, g] : axis_gates(report, thresholds)) gate = std::max(gate, g);
  return gate;
}

// --- seven axes ------------------------------------------------------------------------

QualityReport seven_axes(std::span<const TokenizedFile> files,
                         const std::vector<CoverageRecord>& coverage, const RunReport& run,
                         const QualityOptions& options) {
  if (files.empty()) throw Error(ErrorKind::kDegenerate, "no analyzable files");
  QualityReport report;

  const DuplicationReport dup = duplication(files, options.duplication_window);
  report.duplication_density = dup.density;
  report.duplicate_blocks = dup.blocks;

  std::map<std::string, std::set<int>> code_lines_by_file;
  std::size_t code_lines = 0, comment_lines = 0;
  for (const auto& f : files) {
    std::set<int> code, comments;
    for (const Token& t : f.tokens) {
      if (t.is_comment()) {
        for (int l = t.line; l <= last_line_of(t); ++l) comments.insert(l);
      } else {
        code.insert(t.line);
      }
    }
    code_lines += code.size();
    comment_lines += comments.size();
    code_lines_by_file[f.path] = std::move(code);
  }
  report.comment_density =
      code_lines + comment_lines == 0
          ? 0.0
          : 100.0 * static_cast<double>(comment_lines) / static_cast<double>(code_lines + comment_lines);

  std::vector<int> ccs;
  for (const auto& f : files) {
    for (const auto& span : find_functions(f)) ccs.push_back(cyclomatic_complexity(f, span));
  }
  report.complexity.functions = ccs.size();
  if (!ccs.empty()) {
    long long sum = 0;
    for (int c : ccs) sum += c;
    report.complexity.mean = static_cast<double>(sum) / static_cast<double>(ccs.size());
    report.complexity.max = *std::max_element(ccs.begin(), ccs.end());
  }

  report.violations = run_rules(files, options.rules);
  const std::size_t enabled = [&] {
    std::size_t n = 0;
    for (const auto& r : registered_rules()) {
      auto it = options.rules.find(r.id);
      if (it == options.rules.end() || it->second) ++n;
    }
    return n;
  }();
  const double checks = static_cast<double>(enabled) * static_cast<double>(code_lines);
  report.rule_compliance =
      checks == 0 ? 100.0
                  : std::clamp(100.0 * (1.0 - static_cast<double>(report.violations.size()) / checks),
                               0.0, 100.0);
  report.potential_bugs = static_cast<std::size_t>(
      std::count_if(report.violations.begin(), report.violations.end(), [](const RuleViolation& v) {
        return v.severity == Severity::kBlocker || v.severity == Severity::kCritical;
      }));

  // Coverage: union of line data across records. Files with summary-only
  // data count all their code lines as covered or not; files without any
  // data count as fully uncovered.
  std::map<std::string, std::set<int>> coverable, covered;
  std::map<std::string, bool> summary_hit;
  std::set<std::string> stray;
  for (const auto& rec : coverage) {
    for (const auto& cf : rec.covered) {
      if (!code_lines_by_file.count(cf.path)) {
        stray.insert(cf.path);
        continue;
      }
      if (cf.lines.empty()) {
        summary_hit[cf.path] = summary_hit[cf.path] || cf.hit_lines > 0;
        continue;
      }
      for (const auto& l : cf.lines) {
        coverable[cf.path].insert(l.number);
        if (l.hits > 0) covered[cf.path].insert(l.number);
      }
    }
  }
  for (const auto& p : stray) report.warnings.push_back("coverage reported for unanalyzed file " + p);
  double total = 0, hit = 0;
  for (const auto& [path, lines] : code_lines_by_file) {
    if (coverable.count(path)) {
      total += static_cast<double>(coverable[path].size());
      hit += static_cast<double>(covered[path].size());
    } else {
      total += static_cast<double>(lines.size());
      if (summary_hit[path]) hit += static_cast<double>(lines.size());
    }
  }
  report.unit_test_coverage = total == 0 ? 100.0 : 100.0 * hit / total;

  std::size_t judged = 0, passed = 0;
  for (const auto& r : run.results) {
    if (r.status == TestStatus::kSkip) continue;
    ++judged;
    if (r.status == TestStatus::kPass) ++passed;
  }
  report.unit_test_success =
      judged == 0 ? 100.0 : 100.0 * static_cast<double>(passed) / static_cast<double>(judged);

  report.gate = evaluate_gate(report, options.thresholds);
  return report;
}

std::string quality_report_json(const QualityReport& r) {
  using nlohmann::json;
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"rule", v.rule_id},
                          {"path", v.path},
                          {"line", v.line},
                          {"severity", to_string(v.severity)},
                          {"message", v.message}});
  }
  json blocks = json::array();
  for (const auto& b : r.duplicate_blocks) {
    blocks.push_back({{"a", {{"path", b.path_a}, {"lines", {b.first_line_a, b.last_line_a}}}},
                      {"b", {{"path", b.path_b}, {"lines", {b.first_line_b, b.last_line_b}}}},
                      {"tokens", b.length}});
  }
  json doc = {
      {"axes",
       {{"duplication_density", r.duplication_density},
        {"comment_density", r.comment_density},
        {"complexity",
         {{"mean", r.complexity.mean}, {"max", r.complexity.max}, {"functions", r.complexity.functions}}},
        {"rule_compliance", r.rule_compliance},
        {"potential_bugs", r.potential_bugs},
        {"unit_test_coverage", r.unit_test_coverage},
        {"unit_test_success", r.unit_test_success}}},
      {"gate", to_string(r.gate)},
      {"violations", std::move(violations)},
      {"duplicate_blocks", std::move(blocks)},
      {"warnings", r.warnings},
  };
  return doc.dump(2) + "\n";
}

namespace {

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 1) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

}  // namespace

std::string quality_dashboard_html(const QualityReport& r, const GateThresholds& thresholds) {
  const auto gates = axis_gates(r, thresholds);
  struct Tile {
    const char* key;
    const char* title;
    std::string value;
  };
  const std::vector<Tile> tiles = {
      {"duplication", "Duplications", fixed(r.duplication_density) + "%"},
      {"comments", "Comments", fixed(r.comment_density) + "%"},
      {"complexity", "Complexity", "max " + std::to_string(r.complexity.max) + " / mean " +
                                       fixed(r.complexity.mean, 2)},
      {"rules", "Rules compliance", fixed(r.rule_compliance) + "%"},
      {"potential_bugs", "Potential bugs", std::to_string(r.potential_bugs)},
      {"coverage", "Unit test coverage", fixed(r.unit_test_coverage) + "%"},
      {"test_success", "Unit test success", fixed(r.unit_test_success) + "%"},
  };

  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>Code quality: " << to_string(r.gate) << "</title>\n<style>\n"
      << "body{font-family:sans-serif;margin:2em;background:#fafafa}\n"
      << ".tiles{display:grid;grid-template-columns:repeat(auto-fill,minmax(200px,1fr));gap:1em}\n"
      << ".tile{padding:1em;border-radius:6px;color:#fff}\n"
      << ".tile h2{margin:0 0 .4em;font-size:1em}\n.tile p{margin:0;font-size:1.6em}\n"
      << ".green{background:#2e7d32}.yellow{background:#f9a825}.red{background:#c62828}\n"
      << "table{border-collapse:collapse;margin-top:2em}td,th{border:1px solid #ccc;padding:.3em .6em}\n"
      << "</style>\n</head>\n<body>\n"
      << "<h1>Quality gate: <span class=\"" << to_string(r.gate) << "\">" << to_string(r.gate)
      << "</span></h1>\n<div class=\"tiles\">\n";
  for (const auto& t : tiles) {
    out << "<div class=\"tile " << to_string(gates.at(t.key)) << "\"><h2>" << t.title
        << "</h2><p>" << html_escape(t.value) << "</p></div>\n";
  }
  out << "</div>\n";
  out << "<table>\n<tr><th>Rule</th><th>Severity</th><th>File</th><th>Line</th><th>Message</th></tr>\n";
  for (const auto& v : r.violations) {
    out << "<tr><td>" << v.rule_id << "</td><td>" << to_string(v.severity) << "</td><td>"
        << html_escape(v.path) << "</td><td>" << v.line << "</td><td>" << html_escape(v.message)
        << "</td></tr>\n";
  }
  out << "</table>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace fastfail
