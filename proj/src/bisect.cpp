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

#include "fastfail/bisect.hpp"

#include <algorithm>

#include "fastfail/error.hpp"
#include "json.hpp"

namespace fastfail {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kGood: return "good";
    case Verdict::kBad: return "bad";
    case Verdict::kSkip: return "skip";
  }
  return "skip";
}

BisectSession::BisectSession(CommitJournal journal, std::string known_good,
                             std::string known_bad)
    : journal_(std::move(journal)), good_(std::move(known_good)), bad_(std::move(known_bad)) {
  lo_ = journal_.require_index(good_);
  hi_ = journal_.require_index(bad_);
  if (lo_ >= hi_) {
    throw Error(ErrorKind::kRange,
                "known-good " + good_ + " does not precede known-bad " + bad_);
  }
}

std::vector<std::size_t> BisectSession::candidate_indices() const {
  std::vector<std::size_t> out;
  out.reserve(hi_ - lo_);
  for (std::size_t i = lo_ + 1; i <= hi_; ++i) {
    if (!skipped_.count(i)) out.push_back(i);
  }
  return out;
}

std::vector<std::string> BisectSession::candidates() const {
  std::vector<std::string> out;
  for (std::size_t i : candidate_indices()) out.push_back(journal_.commits()[i].id);
  return out;
}

std::optional<std::string> BisectSession::next() {
  if (state_.kind != BisectState::Kind::kRunning) {
    throw Error(ErrorKind::kState, "bisection already finished");
  }
  const auto cands = candidate_indices();
  if (cands.size() == 1) {
    auto first_skip = skipped_.upper_bound(lo_);
    if (first_skip != skipped_.end() && *first_skip < hi_) {
      state_.kind = BisectState::Kind::kAmbiguous;
      for (auto it = first_skip; it != skipped_.end() && *it < hi_; ++it) {
        state_.ambiguous.push_back(journal_.commits()[*it].id);
      }
      state_.ambiguous.push_back(journal_.commits()[hi_].id);
    } else {
      state_.kind = BisectState::Kind::kFound;
      state_.found = journal_.commits()[hi_].id;
    }
    return std::nullopt;
  }
  return journal_.commits()[cands[(cands.size() - 1) / 2]].id;
}

void BisectSession::report(std::string_view commit, Verdict verdict) {
  if (state_.kind != BisectState::Kind::kRunning) {
    throw Error(ErrorKind::kState, "bisection already finished");
  }
  const std::size_t idx = journal_.require_index(commit);
  const std::size_t good_idx = journal_.require_index(good_);
  const std::size_t bad_idx = journal_.require_index(bad_);
  if (idx < good_idx || idx > bad_idx) {
    throw Error(ErrorKind::kRange, "commit " + std::string(commit) + " is outside " + good_ +
                                       ".." + bad_);
  }
  const auto& ids = journal_.commits();
  switch (verdict) {
    case Verdict::kGood:
      if (idx >= hi_) {
        throw Error(ErrorKind::kConsistency, "good verdict for " + std::string(commit) +
                                                 " contradicts bad verdict for " + ids[hi_].id);
      }
      lo_ = std::max(lo_, idx);
      break;
    case Verdict::kBad:
      if (idx <= lo_) {
        throw Error(ErrorKind::kConsistency, "bad verdict for " + std::string(commit) +
                                                 " contradicts good verdict for " + ids[lo_].id);
      }
      hi_ = std::min(hi_, idx);
      break;
    case Verdict::kSkip:
      if (idx <= lo_ || idx >= hi_) {
        throw Error(ErrorKind::kConsistency,
                    "skip verdict for " + std::string(commit) + " which is already judged " +
                        (idx <= lo_ ? "good by " + ids[lo_].id : "bad by " + ids[hi_].id));
      }
      skipped_.insert(idx);
      break;
  }
  verdicts_[std::string(commit)] = verdict;
  probes_.push_back(Probe{std::string(commit), verdict});
}

std::optional<std::string> bisect_next(BisectSession& session) { return session.next(); }

BisectSession& bisect_report(BisectSession& session, std::string_view commit, Verdict verdict) {
  session.report(commit, verdict);
  return session;
}

BisectOutcome bisect_run(const CommitJournal& journal, const std::string& good,
                         const std::string& bad, const VerdictOracle& oracle,
                         const BisectOptions& options) {
  BisectSession session(journal, good, bad);
  if (options.verify_bounds) {
    if (const Verdict v = oracle(bad); v != Verdict::kBad) {
      throw Error(ErrorKind::kConsistency, "known-bad " + bad + " tested " +
                                               std::string(to_string(v)));
    }
    if (const Verdict v = oracle(good); v != Verdict::kGood) {
      throw Error(ErrorKind::kConsistency, "known-good " + good + " tested " +
                                               std::string(to_string(v)));
    }
  }
  while (auto probe = session.next()) {
    session.report(*probe, oracle(*probe));
  }
  return BisectOutcome{good, bad, session.state(), session.probes()};
}

std::string bisect_transcript_json(const BisectOutcome& outcome) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : outcome.probes) {
    probes.push_back({{"commit", p.commit}, {"verdict", to_string(p.verdict)}});
  }
  nlohmann::json result = nlohmann::json::object();
  if (outcome.result.kind == BisectState::Kind::kFound) {
    result["found"] = outcome.result.found;
  } else if (outcome.result.kind == BisectState::Kind::kAmbiguous) {
    result["ambiguous"] = outcome.result.ambiguous;
  }
  nlohmann::json doc = {{"good", outcome.good},
                        {"bad", outcome.bad},
                        {"probes", std::move(probes)},
                        {"result", std::move(result)}};
  return doc.dump(2) + "\n";
}

// --- notification --------------------------------------------------------------

NotificationMessage render_notification(const std::string& culprit, const CommitJournal& journal,
                                        const std::vector<std::string>& failing_suites,
                                        std::size_t probe_count, const NotifyConfig& config) {
  const ChangeSet& commit = journal.at(culprit);
  NotificationMessage msg;
  msg.to.push_back(commit.author);
  if (!config.manager_address.empty() && config.manager_address != commit.author) {
    msg.to.push_back(config.manager_address);
  }
  for (const auto& addr : config.cc) {
    if (std::find(msg.to.begin(), msg.to.end(), addr) == msg.to.end()) msg.cc.push_back(addr);
  }

  std::string suites_phrase;
  if (failing_suites.empty()) {
    suites_phrase = "no failing suites";
  } else {
    suites_phrase = std::to_string(failing_suites.size()) +
                    (failing_suites.size() == 1 ? " failing suite" : " failing suites");
  }
  msg.subject = std::string(kSubjectPrefix) + " " + commit.id + " by " + commit.author + " (" +
                suites_phrase + ")";

  std::string body;
  body += "A regression was traced to commit " + commit.id + ".\n\n";
  body += "Commit:    " + commit.id + "\n";
  body += "Author:    " + commit.author + "\n";
  body += "Committed: " + format_rfc3339(commit.timestamp) + "\n";
  body += "Probes:    " + std::to_string(probe_count) + "\n\n";
  body += "Changed files:\n";
  if (commit.changes.empty()) body += "  (none)\n";
  for (const auto& ch : commit.changes) {
    switch (ch.type) {
      case ChangeType::kAdded: body += "  A " + ch.path + "\n"; break;
      case ChangeType::kModified: body += "  M " + ch.path + "\n"; break;
      case ChangeType::kDeleted: body += "  D " + ch.path + "\n"; break;
      case ChangeType::kRenamed: body += "  R " + ch.old_path + " -> " + ch.path + "\n"; break;
    }
  }
  body += "\nFailing suites:\n";
  if (failing_suites.empty()) {
    body += "  no failing suites\n";
  } else {
    for (const auto& s : failing_suites) body += "  " + s + "\n";
  }
  body += "\nPlease fix or revert to keep the build green.\n";
  msg.body = std::move(body);
  return msg;
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string to_eml(const NotificationMessage& message) {
  std::string out = "To: " + join(message.to, ", ") + "\n";
  if (!message.cc.empty()) out += "Cc: " + join(message.cc, ", ") + "\n";
  out += "Subject: " + message.subject + "\n";
  out += "\n";
  out += message.body;
  return out;
}

std::filesystem::path write_notification(const NotificationMessage& message,
                                         const std::filesystem::path& outdir,
                                         const std::string& commit) {
  const auto path = outdir / "notify" / (commit + ".eml");
  write_file_atomic(path, to_eml(message));
  return path;
}

}  // namespace fastfail
