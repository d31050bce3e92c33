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

#include <cmath>
#include <random>

#include "fastfail/bisect.hpp"
#include "fastfail/error.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fastfail {
namespace {

CommitJournal linear(std::size_t n, std::size_t first = 1) {
  std::vector<ChangeSet> commits;
  for (std::size_t i = 0; i < n; ++i) {
    ChangeSet c;
    c.id = "c" + std::to_string(first + i);
    if (i > 0) c.parent = commits.back().id;
    c.author = "dev" + std::to_string(i % 4) + "@x.com";
    c.timestamp = from_unix_seconds(1'700'000'000 + static_cast<long long>(i));
    c.changes = {{"src/f" + std::to_string(i) + ".c", ChangeType::kAdded, {}}};
    commits.push_back(std::move(c));
  }
  return CommitJournal(std::move(commits));
}

std::size_t num(const std::string& id) { return std::stoul(id.substr(1)); }

VerdictOracle monotone(std::size_t culprit) {
  return [culprit](const std::string& c) { return num(c) >= culprit ? Verdict::kBad : Verdict::kGood; };
}

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorKind::kValidation, "");
}

TEST(Bisect, LowerMedianOfSevenCandidates) {
  BisectSession s(linear(8), "c1", "c8");
  EXPECT_EQ(s.candidates(), (std::vector<std::string>{"c2", "c3", "c4", "c5", "c6", "c7", "c8"}));
  EXPECT_EQ(bisect_next(s), "c5");
}

TEST(Bisect, ProbeSequenceForCulpritSix) {
  BisectSession s(linear(8), "c1", "c8");
  std::vector<std::string> seen;
  while (auto c = bisect_next(s)) {
    seen.push_back(*c);
    bisect_report(s, *c, monotone(6)(*c));
  }
  EXPECT_EQ(seen, (std::vector<std::string>{"c5", "c7", "c6"}));
  EXPECT_EQ(s.state().kind, BisectState::Kind::kFound);
  EXPECT_EQ(s.state().found, "c6");
  EXPECT_EQ(error_of([&] { bisect_next(s); }).kind(), ErrorKind::kState);
}

TEST(Bisect, PruningRules) {
  BisectSession s(linear(8), "c1", "c8");
  bisect_report(s, "c5", Verdict::kGood);
  EXPECT_EQ(s.candidates(), (std::vector<std::string>{"c6", "c7", "c8"}));
  bisect_report(s, "c7", Verdict::kSkip);
  EXPECT_EQ(s.candidates(), (std::vector<std::string>{"c6", "c8"}));
  bisect_report(s, "c6", Verdict::kBad);
  EXPECT_EQ(s.candidates(), (std::vector<std::string>{"c6"}));
  EXPECT_EQ(bisect_next(s), std::nullopt);
  EXPECT_EQ(s.state().found, "c6");
}

TEST(Bisect, SingleCommitIntervalNeedsNoProbes) {
  const auto out = bisect_run(linear(2), "c1", "c2", [](const std::string&) -> Verdict {
    ADD_FAILURE() << "oracle should not be consulted";
    return Verdict::kBad;
  });
  EXPECT_EQ(out.result.found, "c2");
  EXPECT_TRUE(out.probes.empty());
}

TEST(Bisect, EightCommitsAtMostThreeProbes) {
  const auto j = linear(9, 0);  // c0..c8, interval (c0, c8] has 8 commits
  for (std::size_t culprit = 1; culprit <= 8; ++culprit) {
    const auto out = bisect_run(j, "c0", "c8", monotone(culprit));
    EXPECT_EQ(out.result.found, "c" + std::to_string(culprit));
    EXPECT_LE(out.probes.size(), 3u);
  }
}

TEST(Bisect, ThousandCommitsWithinLogBound) {
  const auto j = linear(1025, 0);
  std::mt19937_64 rng(1024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t culprit = 1 + rng() % 1024;
    int calls = 0;
    const auto out = bisect_run(j, "c0", "c1024", [&](const std::string& c) {
      ++calls;
      return monotone(culprit)(c);
    });
    const auto expected = oracle::linear_bisect(j, "c0", "c1024", monotone(culprit));
    EXPECT_EQ(out.result, expected);
    EXPECT_EQ(out.result.found, "c" + std::to_string(culprit));
    EXPECT_LE(out.probes.size(), 10u);
    EXPECT_EQ(static_cast<std::size_t>(calls), out.probes.size());
  }
}

TEST(Bisect, SkipsMatchLinearOracleAndBound) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 64;
    const auto j = linear(n + 1, 0);
    const std::size_t culprit = 1 + rng() % n;
    std::set<std::size_t> skips;
    for (std::size_t i = 1; i < n; ++i) {
      if (rng() % 4 == 0) skips.insert(i);
    }
    if (trial % 10 == 0 && culprit < n) {
      skips.insert(culprit);
      if (culprit > 1) skips.insert(culprit - 1);
      skips.insert(culprit + 1 < n ? culprit + 1 : culprit);
    }
    const VerdictOracle verdict = [&](const std::string& c) {
      if (skips.count(num(c))) return Verdict::kSkip;
      return monotone(culprit)(c);
    };
    const std::string bad = "c" + std::to_string(n);
    const auto out = bisect_run(j, "c0", bad, verdict);
    EXPECT_EQ(out.result, oracle::linear_bisect(j, "c0", bad, verdict)) << "n=" << n << " culprit=" << culprit;
    std::size_t skip_probes = 0;
    std::set<std::string> good_seen;
    for (const auto& p : out.probes) {
      if (p.verdict == Verdict::kSkip) ++skip_probes;
      EXPECT_FALSE(good_seen.count(p.commit)) << "re-probed " << p.commit;
      good_seen.insert(p.commit);
    }
    const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
    EXPECT_LE(out.probes.size(), bound + skip_probes);
  }
}

TEST(Bisect, CulpritWithSkippedNeighbours) {
  const auto j = linear(9, 0);
  const VerdictOracle verdict = [](const std::string& c) {
    const auto i = num(c);
    if (i == 4 || i == 6) return Verdict::kSkip;
    return i >= 5 ? Verdict::kBad : Verdict::kGood;
  };
  const auto out = bisect_run(j, "c0", "c8", verdict);
  EXPECT_EQ(out.result, oracle::linear_bisect(j, "c0", "c8", verdict));
  ASSERT_EQ(out.result.kind, BisectState::Kind::kAmbiguous);
  EXPECT_EQ(out.result.ambiguous, (std::vector<std::string>{"c4", "c5"}));

  const VerdictOracle all_skip = [](const std::string&) { return Verdict::kSkip; };
  const auto amb = bisect_run(j, "c0", "c8", all_skip);
  EXPECT_EQ(amb.result.kind, BisectState::Kind::kAmbiguous);
  EXPECT_EQ(amb.result.ambiguous.size(), 8u);
}

TEST(Bisect, CandidateSetStrictlyShrinks) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto j = linear(40, 0);
    const std::size_t culprit = 1 + rng() % 39;
    BisectSession s(j, "c0", "c39");
    std::size_t before = s.candidates().size();
    while (auto c = s.next()) {
      const Verdict v = rng() % 5 == 0 ? Verdict::kSkip : monotone(culprit)(*c);
      s.report(*c, v);
      const std::size_t after = s.candidates().size();
      EXPECT_LT(after, before);
      before = after;
    }
  }
}

TEST(Bisect, InconsistentVerdictsRejected) {
  BisectSession s(linear(8), "c1", "c8");
  s.report("c5", Verdict::kBad);
  const Error e = error_of([&] { s.report("c6", Verdict::kGood); });
  EXPECT_EQ(e.kind(), ErrorKind::kConsistency);
  EXPECT_NE(std::string(e.what()).find("c6"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("c5"), std::string::npos);
  s.report("c3", Verdict::kGood);
  EXPECT_EQ(error_of([&] { s.report("c2", Verdict::kBad); }).kind(), ErrorKind::kConsistency);
  EXPECT_EQ(error_of([&] { s.report("c2", Verdict::kSkip); }).kind(), ErrorKind::kConsistency);

}

TEST(Bisect, NonMonotoneOracleStillEndsOnABoundary) {
  std::mt19937_64 rng(11);
  const auto j = linear(33, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Verdict> truth(33);
    for (auto& v : truth) v = rng() % 2 == 0 ? Verdict::kGood : Verdict::kBad;
    const auto out = bisect_run(j, "c0", "c32", [&](const std::string& c) { return truth[num(c)]; });
    ASSERT_EQ(out.result.kind, BisectState::Kind::kFound);
    const std::size_t f = num(out.result.found);
    EXPECT_TRUE(f == 32 || truth[f] == Verdict::kBad);
    EXPECT_TRUE(f - 1 == 0 || truth[f - 1] == Verdict::kGood);
  }
}

TEST(Bisect, SessionPreconditions) {
  EXPECT_EQ(error_of([] { BisectSession(linear(4), "c3", "c2"); }).kind(), ErrorKind::kRange);
  EXPECT_EQ(error_of([] { BisectSession(linear(4), "c2", "c2"); }).kind(), ErrorKind::kRange);
  EXPECT_EQ(error_of([] { BisectSession(linear(4), "c1", "c9"); }).kind(), ErrorKind::kLookup);
  BisectSession s(linear(8), "c2", "c6");
  EXPECT_EQ(error_of([&] { s.report("c7", Verdict::kBad); }).kind(), ErrorKind::kRange);
}

TEST(Bisect, VerifyBounds) {
  BisectOptions opts;
  opts.verify_bounds = true;
  const auto out = bisect_run(linear(8), "c1", "c8", monotone(4), opts);
  EXPECT_EQ(out.result.found, "c4");
  EXPECT_EQ(error_of([&] { bisect_run(linear(8), "c1", "c8", monotone(1), opts); }).kind(),
            ErrorKind::kConsistency);
  EXPECT_EQ(error_of([&] { bisect_run(linear(8), "c1", "c8", monotone(9), opts); }).kind(),
            ErrorKind::kConsistency);
}

TEST(Bisect, TranscriptJson) {
  const auto out = bisect_run(linear(8), "c1", "c8", monotone(6));
  const auto doc = nlohmann::json::parse(bisect_transcript_json(out));
  EXPECT_EQ(doc["good"], "c1");
  EXPECT_EQ(doc["bad"], "c8");
  EXPECT_EQ(doc["result"]["found"], "c6");
  ASSERT_EQ(doc["probes"].size(), 3u);
  EXPECT_EQ(doc["probes"][0]["commit"], "c5");
  EXPECT_EQ(doc["probes"][0]["verdict"], "good");

  const VerdictOracle all_skip = [](const std::string&) { return Verdict::kSkip; };
  const auto amb = nlohmann::json::parse(bisect_transcript_json(bisect_run(linear(4), "c1", "c4", all_skip)));
  EXPECT_EQ(amb["result"]["ambiguous"], nlohmann::json::array({"c2", "c3", "c4"}));
}

CommitJournal golden_journal() {
  return parse_journal(read_file(std::filesystem::path(FASTFAIL_TEST_DATA) / "golden_journal.txt"));
}

TEST(Notification, Recipients) {
  const auto j = golden_journal();
  NotifyConfig cfg;
  cfg.manager_address = "m@x.com";
  auto msg = render_notification("c6", j, {"S"}, 1, cfg);
  EXPECT_EQ(msg.to, (std::vector<std::string>{"a@x.com", "m@x.com"}));
  EXPECT_EQ(msg.subject.rfind("[CI REGRESSION]", 0), 0u);
  // Manager authored the culprit: listed once.
  msg = render_notification("c1", j, {"S"}, 1, cfg);
  EXPECT_EQ(msg.to, std::vector<std::string>{"m@x.com"});
  msg = render_notification("c6", j, {}, 2, {});
  EXPECT_EQ(msg.to, std::vector<std::string>{"a@x.com"});
  EXPECT_NE(msg.body.find("no failing suites"), std::string::npos);
}

TEST(Notification, GoldenFile) {
  const auto j = golden_journal();
  const auto out = bisect_run(j, "c1", "c8", monotone(6));
  ASSERT_EQ(out.result.found, "c6");
  NotifyConfig cfg;
  cfg.manager_address = "m@x.com";
  cfg.cc = {"qa@x.com"};
  const auto msg = render_notification(out.result.found, j, {"AuthFunctional", "LoginUnit"}, out.probes.size(), cfg);
  oracle::TempDir dir;
  const auto path = write_notification(msg, dir.path(), "c6");
  EXPECT_EQ(path, dir / "notify/c6.eml");
  EXPECT_EQ(read_file(path), read_file(std::filesystem::path(FASTFAIL_TEST_DATA) / "notification.eml"));
}

}  // namespace
}  // namespace fastfail
