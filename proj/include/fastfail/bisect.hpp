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

#ifndef FASTFAIL_BISECT_HPP_
#define FASTFAIL_BISECT_HPP_

/// @file bisect.hpp
///
/// Binary search for the first bad commit between a known-good and a
/// known-bad revision, in the style of `git bisect`.
///
/// The candidate list is every commit after the highest Good verdict up to
/// and including the lowest Bad one, minus skipped commits. Each probe is
/// the lower median of that list; the search ends when only the lowest Bad
/// commit is left. History is assumed to regress once (all Good, then all
/// Bad); with several regressions the earliest Bad commit in the narrowed
/// interval wins.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fastfail/vcs.hpp"

namespace fastfail {

enum class Verdict { kGood, kBad, kSkip };

std::string_view to_string(Verdict v);

struct Probe {
  std::string commit;
  Verdict verdict = Verdict::kSkip;

  bool operator==(const Probe&) const = default;
};

struct BisectState {
  enum class Kind { kRunning, kFound, kAmbiguous };
  Kind kind = Kind::kRunning;
  std::string found;                 // kFound
  std::vector<std::string> ambiguous;  // kAmbiguous, journal order

  bool operator==(const BisectState&) const = default;
};

class BisectSession {
 public:
  /// Throws kLookup for unknown ids and kRange unless good precedes bad.
  BisectSession(CommitJournal journal, std::string known_good, std::string known_bad);

  /// Next commit to test, or nullopt when the search is over (state() then
  /// says Found or Ambiguous). Calling again after that is a kState error.
  std::optional<std::string> next();

  /// Records a verdict for any commit in [good, bad]. A verdict that
  /// contradicts an earlier one is a kConsistency error naming both.
  void report(std::string_view commit, Verdict verdict);

  const BisectState& state() const { return state_; }
  const std::vector<Probe>& probes() const { return probes_; }
  const std::map<std::string, Verdict>& verdicts() const { return verdicts_; }
  const std::string& known_good() const { return good_; }
  const std::string& known_bad() const { return bad_; }
  const CommitJournal& journal() const { return journal_; }

  /// Remaining candidates in journal order; the last one is the lowest Bad.
  std::vector<std::string> candidates() const;

 private:
  std::vector<std::size_t> candidate_indices() const;

  CommitJournal journal_;
  std::string good_;
  std::string bad_;
  std::size_t lo_;  // index of highest Good
  std::size_t hi_;  // index of lowest Bad
  std::set<std::size_t> skipped_;
  std::map<std::string, Verdict> verdicts_;
  std::vector<Probe> probes_;
  BisectState state_;
};

std::optional<std::string> bisect_next(BisectSession& session);
BisectSession& bisect_report(BisectSession& session, std::string_view commit, Verdict verdict);

using VerdictOracle = std::function<Verdict(const std::string& commit)>;

struct BisectOptions {
  // Probe both bounds first and reject the run if they disagree with their
  // labels. These checks are not counted as probes.
  bool verify_bounds = false;
};

struct BisectOutcome {
  std::string good;
  std::string bad;
  BisectState result;
  std::vector<Probe> probes;
};

BisectOutcome bisect_run(const CommitJournal& journal, const std::string& good,
                         const std::string& bad, const VerdictOracle& oracle,
                         const BisectOptions& options = {});

/// `{"good","bad","probes":[{"commit","verdict"}],"result":{"found"|"ambiguous"}}`
std::string bisect_transcript_json(const BisectOutcome& outcome);

struct NotificationMessage {
  std::vector<std::string> to;
  std::vector<std::string> cc;
  std::string subject;
  std::string body;
};

struct NotifyConfig {
  std::string manager_address;
  std::vector<std::string> cc;
};

inline constexpr std::string_view kSubjectPrefix = "[CI REGRESSION]";

NotificationMessage render_notification(const std::string& culprit, const CommitJournal& journal,
                                        const std::vector<std::string>& failing_suites,
                                        std::size_t probe_count, const NotifyConfig& config);

/// RFC-822 style text: To, Cc (when set), Subject, blank line, body. LF.
std::string to_eml(const NotificationMessage& message);

/// Writes `<outdir>/notify/<commit>.eml` and returns the path.
std::filesystem::path write_notification(const NotificationMessage& message,
                                         const std::filesystem::path& outdir,
                                         const std::string& commit);

}  // namespace fastfail

#endif  // FASTFAIL_BISECT_HPP_
