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

#include <gtest/gtest.h>

#include <random>

#include "fastfail/error.hpp"
#include "fastfail/quality.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fastfail {
namespace {

TokenizedFile lex(const std::string& path, const std::string& text) { return tokenize(text, path); }

int cc_of(const std::string& text) {
  const auto f = lex("a.c", text);
  const auto spans = find_functions(f);
  EXPECT_EQ(spans.size(), 1u);
  return spans.empty() ? 0 : cyclomatic_complexity(f, spans[0]);
}

TEST(Functions, BraceHeuristic) {
  const auto f = lex("a.java",
                     "class A {\n"
                     "  public int one(int x) throws IOException {\n"
                     "    return x;\n"
                     "  }\n"
                     "  void two() const {\n"
                     "    run(() -> { go(); });\n"
                     "  }\n"
                     "}\n");
  const auto spans = find_functions(f);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].name, "one");
  EXPECT_EQ(spans[0].start_line, 2);
  EXPECT_EQ(spans[0].end_line, 4);
  EXPECT_EQ(spans[1].name, "two");
  EXPECT_EQ(spans[1].end_line, 7);
  for (std::size_t i = 1; i < spans.size(); ++i) EXPECT_GT(spans[i].start_line, spans[i - 1].end_line);
}

TEST(Functions, BracelessFileIsOneSpan) {
  const auto f = lex("s.py", "x = 1\nif x:\n    print(x)\n");
  const auto spans = find_functions(f);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].start_line, 1);
  EXPECT_EQ(spans[0].end_line, 3);
  EXPECT_EQ(cyclomatic_complexity(f, spans[0]), 2);
}

TEST(Complexity, Examples) {
  EXPECT_EQ(cc_of("int f() { int a = 1; return a; }"), 1);
  EXPECT_EQ(cc_of("int f(int n) {\n  if (n > 0 && n < 9) { }\n  for (;;) { break; }\n}"), 4);
  EXPECT_EQ(cc_of("void f() { log(\"if while for\"); }"), 1);
  EXPECT_EQ(cc_of("int f(int x) { switch (x) { case 1: return 2; case 2: return x ? 1 : 0; } "
                  "try { g(); } catch (E e) { } while (x || y) {} }"),
            1 + 2 + 1 + 1 + 1 + 1);
  EXPECT_EQ(cyclomatic_complexity(std::span<const Token>{}), 1);
}

TEST(Complexity, InvariantUnderCommentAndStringContent) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> filler = {"if", "while", "&&", "||", "?", "case", "for", "x", "catch"};
  for (int trial = 0; trial < 200; ++trial) {
    auto noise = [&] {
      std::string s;
      for (int i = 0; i < 5; ++i) s += filler[rng() % filler.size()] + " ";
      return s;
    };
    const std::string a = "int f(int x) { /* " + noise() + "*/ if (x && g(\"" + noise() + "\")) { } // " + noise() + "\n}";
    const std::string b = "int f(int x) { /* " + noise() + "*/ if (x && g(\"" + noise() + "\")) { } // " + noise() + "\n}";
    EXPECT_EQ(cc_of(a), 3);
    EXPECT_EQ(cc_of(a), cc_of(b));
  }
}

std::set<std::tuple<std::string, std::size_t, std::string, std::size_t, std::size_t>> block_set(
    const std::vector<DuplicateBlock>& blocks) {
  std::set<std::tuple<std::string, std::size_t, std::string, std::size_t, std::size_t>> out;
  for (const auto& b : blocks) {
    auto x = std::pair(b.path_a, b.start_a);
    auto y = std::pair(b.path_b, b.start_b);
    if (y < x) std::swap(x, y);
    out.emplace(x.first, x.second, y.first, y.second, b.length);
  }
  return out;
}

std::set<std::tuple<std::string, std::size_t, std::string, std::size_t, std::size_t>> block_set(
    const std::vector<oracle::BruteBlock>& blocks) {
  std::set<std::tuple<std::string, std::size_t, std::string, std::size_t, std::size_t>> out;
  for (const auto& b : blocks) out.emplace(b.path_a, b.start_a, b.path_b, b.start_b, b.length);
  return out;
}

TEST(Duplication, VerbatimCopyDuplicatesEveryLine) {
  const std::string text =
      "int sum(int* v, int n) {\n  int s = 0;\n  for (int i = 0; i < n; ++i) {\n    s += v[i];\n  }\n  return s;\n}\n";
  const std::vector<TokenizedFile> files = {lex("a.c", text), lex("b.c", text)};
  const auto rep = duplication(files, 10);
  EXPECT_EQ(rep.code_lines, 14u);
  EXPECT_EQ(rep.duplicated_lines, 14u);
  EXPECT_DOUBLE_EQ(rep.density, 100.0);
  ASSERT_EQ(rep.blocks.size(), 1u);
  EXPECT_EQ(rep.blocks[0].first_line_a, 1);
  EXPECT_EQ(rep.blocks[0].last_line_b, 7);
}

TEST(Duplication, NoRepeatMeansZero) {
  const std::vector<TokenizedFile> files = {lex("a.c", "int a = b + c * d - e / f;"), lex("b.c", "return g(h, i, j);")};
  const auto rep = duplication(files, 4);
  EXPECT_TRUE(rep.blocks.empty());
  EXPECT_DOUBLE_EQ(rep.density, 0.0);
}

TEST(Duplication, LiteralsCompareByKind) {
  const std::vector<TokenizedFile> files = {lex("a.c", "x = f(1, \"a\", y) + g(2);"),
                                            lex("b.c", "x = f(99, 'zz', y) + g(3.5);")};
  const auto rep = duplication(files, 10);
  ASSERT_EQ(rep.blocks.size(), 1u);
  EXPECT_EQ(rep.blocks[0].length, 16u);
  EXPECT_EQ(normalized_token(files[0].tokens[4]), normalized_token(files[1].tokens[4]));
  EXPECT_NE(normalized_token(files[0].tokens[0]), normalized_token(files[0].tokens[2]));
}

std::string unique_tokens(std::mt19937_64& rng, int n, int& counter, int per_line = 6) {
  static const std::vector<std::string> puncts = {"+", "-", "*", ";", ",", "="};
  std::string s;
  for (int i = 0; i < n; ++i) {
    s += rng() % 3 == 0 ? puncts[rng() % puncts.size()] : "u" + std::to_string(counter++);
    s += (i + 1) % per_line == 0 ? "\n" : " ";
  }
  return s;
}

TEST(Duplication, PlantedTwentyTokenClone) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 30; ++trial) {
    int counter = 0;
    // Identifiers in the clone are unique; neighbours are fresh names so the
    // clone cannot extend.
    std::string clone;
    for (int i = 0; i < 10; ++i) clone += "c" + std::to_string(i) + (i % 3 == 0 ? " . " : " ( ");
    const std::vector<TokenizedFile> files = {
        lex("p/one.c", unique_tokens(rng, 40, counter) + " id" + std::to_string(counter++) + " " + clone + " id" +
                           std::to_string(counter++) + "\n" + unique_tokens(rng, 30, counter)),
        lex("p/two.c", unique_tokens(rng, 25, counter) + "\nid" + std::to_string(counter++) + " " + clone + "\nid" +
                           std::to_string(counter++) + " " + unique_tokens(rng, 12, counter)),
        lex("p/three.c", unique_tokens(rng, 50, counter))};
    const auto rep = duplication(files, 10);
    const auto brute = oracle::brute_duplication(files, 10);
    EXPECT_EQ(block_set(rep.blocks), block_set(brute.blocks));
    EXPECT_EQ(rep.duplicated_lines, brute.duplicated_lines);
    EXPECT_EQ(rep.code_lines, brute.code_lines);
    const auto twenty = std::count_if(rep.blocks.begin(), rep.blocks.end(), [](const DuplicateBlock& b) {
      return b.length == 20 && b.path_a != b.path_b;
    });
    EXPECT_EQ(twenty, 1);
  }
}

TEST(Duplication, MatchesBruteForceOnRandomCorpora) {
  std::mt19937_64 rng(1);
  const std::vector<std::string> alphabet = {"a", "b", "c", "+", "1", "\"s\"", "if", "(", ")"};
  int exact = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenizedFile> files;
    const int n_files = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < n_files; ++f) {
      std::string text;
      const int n = static_cast<int>(rng() % 50);
      for (int i = 0; i < n; ++i) {
        text += alphabet[rng() % (3 + trial % 6)];
        text += rng() % 5 == 0 ? "\n" : " ";
        if (rng() % 17 == 0) text += "/* c */ ";
      }
      files.push_back(lex("f" + std::to_string(f) + ".c", text));
    }
    const std::size_t window = 2 + rng() % 5;
    const auto rep = duplication(files, window);
    const auto brute = oracle::brute_duplication(files, window);
    ASSERT_EQ(rep.duplicated_lines, brute.duplicated_lines) << "trial " << trial;
    ASSERT_EQ(rep.code_lines, brute.code_lines);
    // While no window repeats more than 64 times every pair is reported.
    std::map<std::string, int> occurrences;
    for (const auto& f : files) {
      std::vector<std::string> norm;
      for (const auto& t : f.tokens) {
        if (!t.is_comment()) norm.push_back(normalized_token(t));
      }
      for (std::size_t i = 0; i + window <= norm.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < window; ++k) key += norm[i + k] + '\x1f';
        ++occurrences[key];
      }
    }
    int largest = 0;
    for (const auto& [key, n] : occurrences) largest = std::max(largest, n);
    if (largest <= 64) {
      ++exact;
      EXPECT_EQ(block_set(rep.blocks), block_set(brute.blocks)) << "trial " << trial;
    }
  }
  EXPECT_GT(exact, 150);
}

TEST(Duplication, SymmetricInOrderAndInvariantUnderRenaming) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> alphabet = {"x", "y", "=", "+", ";", "f", "(", ")"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenizedFile> files;
    for (int f = 0; f < 4; ++f) {
      std::string text;
      for (int i = 0; i < 60; ++i) text += alphabet[rng() % alphabet.size()] + (i % 7 == 6 ? "\n" : " ");
      files.push_back(lex("dir/f" + std::to_string(f) + ".c", text));
    }
    const double base = duplication(files, 6).density;
    auto shuffled = files;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_DOUBLE_EQ(duplication(shuffled, 6).density, base);
    auto renamed = files;
    for (auto& f : renamed) f.path = "other/" + std::to_string(rng() % 1000) + f.path;
    EXPECT_DOUBLE_EQ(duplication(renamed, 6).density, base);
  }
}

TEST(Duplication, WindowMustBeAtLeastTwo) {
  const std::vector<TokenizedFile> files = {lex("a.c", "a b")};
  try {
    duplication(files, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

std::vector<RuleViolation> rules_on(const std::string& text, const RuleConfig& cfg = {}) {
  const std::vector<TokenizedFile> files = {lex("src/x.java", text)};
  return run_rules(files, cfg);
}

TEST(Rules, HardcodedPassword) {
  const auto v = rules_on("pwd = \"hunter2\"");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule_id, "R2");
  EXPECT_EQ(v[0].severity, Severity::kCritical);
  EXPECT_EQ(v[0].line, 1);
  EXPECT_TRUE(rules_on("pwd = \"\"").empty());
  EXPECT_TRUE(rules_on("pwd = readSecret()").empty());
  EXPECT_EQ(rules_on("config = { apiToken: 'abc' }").size(), 1u);
}

TEST(Rules, SqlConcatenation) {
  const auto v = rules_on("x = 1;\nquery(\"SELECT * FROM t WHERE id=\" + userId)");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule_id, "R1");
  EXPECT_EQ(v[0].severity, Severity::kBlocker);
  EXPECT_EQ(v[0].line, 2);
  EXPECT_EQ(rules_on("q = name + \" delete from users\"").size(), 1u);
  EXPECT_TRUE(rules_on("query(\"SELECT * FROM t WHERE id=?\", userId)").empty());
  EXPECT_TRUE(rules_on("msg = \"selected \" + n").empty());
}

TEST(Rules, EmptyCatchLoggingAndUrls) {
  auto v = rules_on("try { go(); } catch (IOException e) { }\ntry { go(); } catch (E e) { handle(e); }");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule_id, "R3");
  EXPECT_EQ(v[0].severity, Severity::kMajor);

  v = rules_on("logger.info(\"user\", password);\nprint(password);\nLOG(token)");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].rule_id, "R4");
  EXPECT_EQ(v[0].line, 1);
  EXPECT_EQ(v[1].line, 3);

  v = rules_on("u = \"/api/orders/\" + orderId;\nw = \"https://x.com/u/\" + 42;\nz = \"plain\" + orderId");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].rule_id, "R5");
  EXPECT_EQ(v[0].severity, Severity::kMinor);
  EXPECT_EQ(v[1].line, 2);
}

TEST(Rules, CleanFileAndOrdering) {
  EXPECT_TRUE(rules_on("int add(int a, int b) { return a + b; }").empty());
  const std::vector<TokenizedFile> files = {
      lex("b.java", "secret = \"s\"; q(\"SELECT x\" + y);"),
      lex("a.java", "catch (E e) {}\npwd = \"p\""),
  };
  const auto v = run_rules(files);
  std::vector<std::tuple<std::string, int, std::string>> keys;
  for (const auto& x : v) keys.emplace_back(x.path, x.line, x.rule_id);
  EXPECT_EQ(keys, (std::vector<std::tuple<std::string, int, std::string>>{
                      {"a.java", 1, "R3"}, {"a.java", 2, "R2"}, {"b.java", 1, "R1"}, {"b.java", 1, "R2"}}));
  EXPECT_EQ(run_rules(files), v);
}

TEST(Rules, ConfigToggles) {
  EXPECT_TRUE(rules_on("pwd = \"hunter2\"", {{"R2", false}}).empty());
  EXPECT_EQ(rules_on("pwd = \"hunter2\"", {{"R1", false}}).size(), 1u);
  try {
    rules_on("x", {{"R9", true}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  EXPECT_EQ(registered_rules().size(), 6u);
}

TEST(Rules, InvalidEncodingIsMinor) {
  const auto v = rules_on("a = 1;\nb = \"\xFF\";\n");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule_id, "R0");
  EXPECT_EQ(v[0].line, 2);
  EXPECT_EQ(v[0].severity, Severity::kMinor);
}

RunReport results(std::initializer_list<TestStatus> statuses) {
  RunReport r;
  int i = 0;
  for (auto s : statuses) r.results.push_back({"S" + std::to_string(i++), s, 1, "", 1, ""});
  return r;
}

TEST(SevenAxes, HandComputedFixture) {
  const std::vector<TokenizedFile> files = {
      lex("src/a.c",
          "// helper\n"
          "int add(int x, int y) {\n"
          "  if (x && y) { return 1; }\n"
          "  return x + y;\n"
          "}\n"),
      lex("src/b.c",
          "/* config\n"
          "   values */\n"
          "pwd = \"hunter2\";\n"
          "int f() { return 0; }\n"),
  };
  const std::vector<CoverageRecord> coverage = {
      {"S", "", "r", {{"src/a.c", 2, {{2, 1}, {3, 1}, {4, 0}}}, {"src/b.c", 5, {}}, {"src/zzz.c", 1, {}}}}};
  QualityOptions opts;
  const auto q = seven_axes(files, coverage, results({TestStatus::kPass, TestStatus::kPass, TestStatus::kFail,
                                                      TestStatus::kSkip}),
                            opts);
  // Code lines: a 2..5, b 3..4 = 6. Comment lines: a 1, b 1..2 = 3.
  EXPECT_NEAR(q.comment_density, 100.0 * 3 / 9, 1e-9);
  EXPECT_EQ(q.complexity.functions, 2u);
  EXPECT_EQ(q.complexity.max, 3);
  EXPECT_DOUBLE_EQ(q.complexity.mean, 2.0);
  ASSERT_EQ(q.violations.size(), 1u);
  EXPECT_EQ(q.potential_bugs, 1u);
  // 6 rules x 6 code lines.
  EXPECT_NEAR(q.rule_compliance, 100.0 * (1.0 - 1.0 / 36.0), 1e-9);
  EXPECT_DOUBLE_EQ(q.duplication_density, 0.0);
  // a: lines 2,3 of 3 coverable; b: summary hit covers both code lines.
  EXPECT_NEAR(q.unit_test_coverage, 80.0, 1e-9);
  EXPECT_NEAR(q.unit_test_success, 200.0 / 3.0, 1e-9);
  ASSERT_EQ(q.warnings.size(), 1u);
  EXPECT_NE(q.warnings[0].find("src/zzz.c"), std::string::npos);
  EXPECT_EQ(q.gate, Gate::kGreen);
}

TEST(SevenAxes, ExtremalFixtureIsGreen) {
  const std::vector<TokenizedFile> files = {lex("src/a.c", "// adds\nint add(int a, int b) {\n  return a + b;\n}\n")};
  const std::vector<CoverageRecord> coverage = {{"S", "", "r", {{"src/a.c", 3, {{2, 1}, {3, 1}, {4, 1}}}}}};
  const auto q = seven_axes(files, coverage, results({TestStatus::kPass, TestStatus::kPass}), {});
  EXPECT_DOUBLE_EQ(q.unit_test_coverage, 100.0);
  EXPECT_DOUBLE_EQ(q.unit_test_success, 100.0);
  EXPECT_DOUBLE_EQ(q.rule_compliance, 100.0);
  EXPECT_DOUBLE_EQ(q.duplication_density, 0.0);
  EXPECT_EQ(q.potential_bugs, 0u);
  EXPECT_EQ(q.complexity.max, 1);
  EXPECT_EQ(q.gate, Gate::kGreen);
}

TEST(SevenAxes, BlockerMakesBugsAndRed) {
  const std::vector<TokenizedFile> files = {lex("src/a.java", "void f() { q(\"DELETE FROM t WHERE k=\" + k); }\n")};
  const std::vector<CoverageRecord> coverage = {{"S", "", "r", {{"src/a.java", 1, {}}}}};
  const auto q = seven_axes(files, coverage, results({TestStatus::kPass}), {});
  EXPECT_GE(q.potential_bugs, 1u);
  EXPECT_EQ(q.gate, Gate::kRed);
}

TEST(SevenAxes, DegenerateAndMissingCoverage) {
  try {
    seven_axes({}, {}, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
  const std::vector<TokenizedFile> files = {lex("src/a.c", "int a;\nint b;\n")};
  const auto q = seven_axes(files, {}, {}, {});
  EXPECT_DOUBLE_EQ(q.unit_test_coverage, 0.0);
  EXPECT_DOUBLE_EQ(q.unit_test_success, 100.0);
  EXPECT_EQ(q.gate, Gate::kRed);
}

QualityReport best() {
  QualityReport r;
  r.comment_density = 30;
  r.unit_test_coverage = 100;
  r.complexity.max = 1;
  return r;
}

TEST(Gate, Examples) {
  const auto t = GateThresholds::defaults();
  EXPECT_EQ(evaluate_gate(best(), t), Gate::kGreen);
  auto r = best();
  r.violations.push_back({"R1", "a", 1, Severity::kBlocker, ""});
  EXPECT_EQ(evaluate_gate(r, t), Gate::kRed);
  r = best();
  r.unit_test_coverage = 72;
  EXPECT_EQ(evaluate_gate(r, t), Gate::kYellow);
  EXPECT_EQ(axis_gates(r, t).at("coverage"), Gate::kYellow);
  r.unit_test_coverage = 49.9;
  EXPECT_EQ(evaluate_gate(r, t), Gate::kRed);
  r = best();
  r.duplication_density = 15;
  EXPECT_EQ(evaluate_gate(r, t), Gate::kYellow);
  r.complexity.max = 21;
  EXPECT_EQ(evaluate_gate(r, t), Gate::kRed);
  EXPECT_EQ(axis_gates(r, t).size(), 7u);
}

TEST(Gate, MalformedThresholds) {
  GateThresholds t = GateThresholds::defaults();
  t.coverage = AxisThreshold{40, 50};
  EXPECT_THROW(t.validate(), Error);
  t = GateThresholds::defaults();
  t.duplication = AxisThreshold{30, 20};
  try {
    evaluate_gate(best(), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(Gate, ImprovingAnAxisNeverWorsensTheGate) {
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> pct(0, 100);
  auto pair = [&](bool higher) {
    double a = pct(rng), b = pct(rng);
    if (higher) return AxisThreshold{std::max(a, b), std::min(a, b)};
    return AxisThreshold{std::min(a, b), std::max(a, b)};
  };
  for (int trial = 0; trial < 500; ++trial) {
    GateThresholds t;
    if (rng() % 4) t.coverage = pair(true);
    if (rng() % 4) t.duplication = pair(false);
    if (rng() % 4) t.max_complexity = AxisThreshold{static_cast<double>(rng() % 15), static_cast<double>(15 + rng() % 15)};
    if (rng() % 4) t.comment_density = pair(true);
    if (rng() % 4) t.rule_compliance = pair(true);
    if (rng() % 4) t.potential_bugs = AxisThreshold{static_cast<double>(rng() % 3), static_cast<double>(3 + rng() % 3)};
    if (rng() % 4) t.test_success = pair(true);
    QualityReport r;
    r.unit_test_coverage = pct(rng);
    r.duplication_density = pct(rng);
    r.complexity.max = static_cast<int>(1 + rng() % 40);
    r.comment_density = pct(rng);
    r.rule_compliance = pct(rng);
    r.potential_bugs = rng() % 8;
    r.unit_test_success = pct(rng);
    if (rng() % 10 == 0) r.violations.push_back({"R1", "a", 1, Severity::kBlocker, ""});
    const Gate before = evaluate_gate(r, t);
    QualityReport better = r;
    switch (rng() % 7) {
      case 0: better.unit_test_coverage = std::min(100.0, r.unit_test_coverage + pct(rng)); break;
      case 1: better.duplication_density = std::max(0.0, r.duplication_density - pct(rng)); break;
      case 2: better.complexity.max = std::max(1, r.complexity.max - static_cast<int>(rng() % 20)); break;
      case 3: better.comment_density = std::min(100.0, r.comment_density + pct(rng)); break;
      case 4: better.rule_compliance = std::min(100.0, r.rule_compliance + pct(rng)); break;
      case 5: better.potential_bugs = r.potential_bugs - std::min<std::size_t>(r.potential_bugs, rng() % 5); break;
      default: better.unit_test_success = std::min(100.0, r.unit_test_success + pct(rng)); break;
    }
    EXPECT_LE(static_cast<int>(evaluate_gate(better, t)), static_cast<int>(before));
  }
}

TEST(QualityOutput, JsonAndDashboard) {
  const std::vector<TokenizedFile> files = {lex("src/a.c", "int f() {\n  pwd = \"x\";\n  return 1;\n}\n")};
  const auto q = seven_axes(files, {}, {}, {});
  const auto doc = nlohmann::json::parse(quality_report_json(q));
  EXPECT_EQ(doc["gate"], "red");
  EXPECT_EQ(doc["violations"].size(), 1u);
  const std::string html = quality_dashboard_html(q, GateThresholds::defaults());
  EXPECT_EQ(html.rfind("<!DOCTYPE html>", 0), 0u);
  for (const char* axis : {"Duplications", "Comments", "Complexity", "Rules compliance", "Potential bugs", "Unit test coverage", "Unit test success"}) {
    EXPECT_NE(html.find(axis), std::string::npos) << axis;
  }
  EXPECT_EQ(html.find("<script"), std::string::npos);
  EXPECT_EQ(html.find("http"), std::string::npos);
}

}  // namespace
}  // namespace fastfail
