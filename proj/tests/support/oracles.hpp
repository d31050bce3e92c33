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

// Brute-force reference implementations and fixtures shared by the unit
// and acceptance tests. Everything here is written for obviousness, not
// speed, and shares no code with the library's own algorithms.

#ifndef FASTFAIL_TESTS_ORACLES_HPP_
#define FASTFAIL_TESTS_ORACLES_HPP_

#include <stdlib.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fastfail/bisect.hpp"
#include "fastfail/lexer.hpp"
#include "fastfail/mapper.hpp"
#include "fastfail/selection.hpp"
#include "fastfail/vcs.hpp"

namespace oracle {

using namespace fastfail;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "fastfail-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// --- mapper -------------------------------------------------------------------------

inline std::set<std::string> suites_for_files(const MapperDatabase& db, const std::set<std::string>& paths) {
  std::set<std::string> out;
  for (const auto& [key, edge] : db.edges()) {
    for (const auto& p : paths) {
      if (edge.path == p) out.insert(edge.suite_id);
    }
  }
  return out;
}

inline std::set<std::pair<std::string, std::string>> edge_pairs(const MapperDatabase& db) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [key, edge] : db.edges()) out.emplace(edge.suite_id, edge.path);
  return out;
}

// --- selection ------------------------------------------------------------------------

// Changed Code paths, counting both ends of a rename.
inline std::set<std::string> changed_code_paths(const NetChanges& changed) {
  std::set<std::string> out;
  for (const auto& [path, ch] : changed) {
    if (classify_path(path) == Classification::kCode) out.insert(path);
    if (ch.type == ChangeType::kRenamed && classify_path(ch.old_path) == Classification::kCode) {
      out.insert(ch.old_path);
    }
  }
  return out;
}

// For every suite of `kind`: does its mapped file set intersect the changed
// Code paths? Case-level edges produce "suite::case" entries unless a
// suite-level edge also matched.
inline std::vector<std::string> select_kind(const MapperDatabase& db, const NetChanges& changed, SuiteKind kind) {
  const auto code = changed_code_paths(changed);
  std::set<std::string> out;
  for (const auto& [id, suite] : db.suites()) {
    if (suite.kind != kind) continue;
    bool whole = false;
    std::set<std::string> cases;
    for (const auto& [key, edge] : db.edges()) {
      if (edge.suite_id != id || !code.count(edge.path)) continue;
      if (edge.case_id.empty()) {
        whole = true;
      } else {
        cases.insert(edge.case_id);
      }
    }
    if (whole) {
      out.insert(id);
    } else {
      for (const auto& c : cases) out.insert(id + "::" + c);
    }
  }
  return {out.begin(), out.end()};
}

// --- vcs ------------------------------------------------------------------------------

// Random valid linear journal with adds, modifies, deletes and renames.
inline CommitJournal random_journal(std::mt19937_64& rng, std::size_t n_commits, std::size_t max_changes = 4,
                                    bool allow_renames = true) {
  std::vector<ChangeSet> commits;
  std::set<std::string> live;
  std::set<std::string> gone;
  std::size_t next_file = 0;
  auto fresh = [&] { return "src/f" + std::to_string(next_file++) + ".c"; };
  for (std::size_t i = 0; i < n_commits; ++i) {
    ChangeSet c;
    c.id = "c" + std::to_string(i);
    if (i > 0) c.parent = commits.back().id;
    c.author = "dev" + std::to_string(rng() % 3) + "@example.com";
    c.timestamp = from_unix_seconds(1'600'000'000 + static_cast<long long>(i) * 10);
    std::set<std::string> used;
    const std::size_t k = 1 + rng() % max_changes;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<std::string> avail;
      for (const auto& p : live) {
        if (!used.count(p)) avail.push_back(p);
      }
      const int op = avail.empty() ? 0 : static_cast<int>(rng() % (allow_renames ? 4 : 3));
      if (op == 0) {
        // Sometimes bring back a name that was deleted or renamed away.
        std::string p;
        for (const auto& g : gone) {
          if (!used.count(g) && rng() % 3 == 0) {
            p = g;
            break;
          }
        }
        if (p.empty()) p = fresh();
        gone.erase(p);
        c.changes.push_back({p, ChangeType::kAdded, {}});
        used.insert(p);
        live.insert(p);
        continue;
      }
      const std::string p = avail[rng() % avail.size()];
      used.insert(p);
      if (op == 1) {
        c.changes.push_back({p, ChangeType::kModified, {}});
      } else if (op == 2) {
        c.changes.push_back({p, ChangeType::kDeleted, {}});
        live.erase(p);
        gone.insert(p);
      } else {
        std::string q = fresh();
        used.insert(q);
        c.changes.push_back({q, ChangeType::kRenamed, p});
        live.erase(p);
        gone.insert(p);
        live.insert(q);
      }
    }
    commits.push_back(std::move(c));
  }
  return CommitJournal(std::move(commits));
}

// Replays the range over the real tree at `from`, tracking where each
// surviving file came from, then classifies by comparing start and end.
inline NetChanges replay_changes(const CommitJournal& journal, const std::optional<std::string>& from,
                                 const std::string& to) {
  struct Ident {
    std::optional<std::string> origin;
    bool modified = false;
  };
  std::map<std::string, Ident> state;
  std::set<std::string> before;
  std::size_t begin = 0;
  if (from) {
    for (const auto& [path, version] : materialize(journal, *from)) {
      before.insert(path);
      state[path] = Ident{path, false};
    }
    begin = *journal.index_of(*from) + 1;
  }
  const std::size_t end = *journal.index_of(to);
  for (std::size_t i = begin; i <= end; ++i) {
    for (const auto& ch : journal.commits()[i].changes) {
      if (ch.type == ChangeType::kAdded) {
        state[ch.path] = Ident{std::nullopt, true};
      } else if (ch.type == ChangeType::kModified) {
        state[ch.path].modified = true;
      } else if (ch.type == ChangeType::kDeleted) {
        state.erase(ch.path);
      } else {
        Ident id = state[ch.old_path];
        state.erase(ch.old_path);
        state[ch.path] = id;
      }
    }
  }
  NetChanges net;
  std::set<std::string> renamed_from;
  for (const auto& [path, id] : state) {
    if (before.count(path)) {
      if (id.origin != path || id.modified) net[path] = {path, ChangeType::kModified, {}};
    } else if (!id.origin) {
      net[path] = {path, ChangeType::kAdded, {}};
    } else {
      net[path] = {path, ChangeType::kRenamed, *id.origin};
      renamed_from.insert(*id.origin);
    }
  }
  for (const auto& path : before) {
    if (!state.count(path) && !renamed_from.count(path)) net[path] = {path, ChangeType::kDeleted, {}};
  }
  return net;
}

// --- bisect ---------------------------------------------------------------------------

// Walks (good, bad] in order. The first non-skipped Bad commit is the answer;
// skipped commits directly before it (back to the last Good) make the
// answer ambiguous.
inline BisectState linear_bisect(const CommitJournal& journal, const std::string& good, const std::string& bad,
                                 const std::function<Verdict(const std::string&)>& verdict) {
  const std::size_t lo = *journal.index_of(good);
  const std::size_t hi = *journal.index_of(bad);
  std::vector<std::string> pending_skips;
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    const std::string& id = journal.commits()[i].id;
    const Verdict v = i == hi ? Verdict::kBad : verdict(id);
    if (v == Verdict::kSkip) {
      pending_skips.push_back(id);
    } else if (v == Verdict::kGood) {
      pending_skips.clear();
    } else {
      BisectState s;
      if (pending_skips.empty()) {
        s.kind = BisectState::Kind::kFound;
        s.found = id;
      } else {
        s.kind = BisectState::Kind::kAmbiguous;
        s.ambiguous = pending_skips;
        s.ambiguous.push_back(id);
      }
      return s;
    }
  }
  return {};
}

// --- quality --------------------------------------------------------------------------

struct BruteBlock {
  std::string path_a;
  std::size_t start_a;
  std::string path_b;
  std::size_t start_b;
  std::size_t length;
  bool operator<(const BruteBlock& o) const {
    return std::tie(path_a, start_a, path_b, start_b) < std::tie(o.path_a, o.start_a, o.path_b, o.start_b);
  }
  bool operator==(const BruteBlock& o) const {
    return std::tie(path_a, start_a, path_b, start_b, length) ==
           std::tie(o.path_a, o.start_a, o.path_b, o.start_b, o.length);
  }
};

struct BruteDuplication {
  std::vector<BruteBlock> blocks;
  std::size_t duplicated_lines = 0;
  std::size_t code_lines = 0;
};

// All-pairs window comparison.
inline BruteDuplication brute_duplication(std::vector<TokenizedFile> files, std::size_t window) {
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  struct Tok {
    std::string norm;
    int line;
  };
  std::vector<std::vector<Tok>> streams;
  BruteDuplication out;
  for (const auto& f : files) {
    std::vector<Tok> s;
    std::set<int> lines;
    for (const auto& t : f.tokens) {
      if (t.is_comment()) continue;
      std::string norm = t.text;
      if (t.kind == TokenKind::kNumberLiteral) norm = "<number>";
      if (t.kind == TokenKind::kStringLiteral) norm = "<string>";
      s.push_back({norm, t.line});
      lines.insert(t.line);
    }
    out.code_lines += lines.size();
    streams.push_back(std::move(s));
  }
  auto eq = [&](std::size_t a, std::size_t i, std::size_t b, std::size_t j) {
    return streams[a][i].norm == streams[b][j].norm;
  };
  std::vector<std::vector<bool>> dup(streams.size());
  for (std::size_t a = 0; a < streams.size(); ++a) dup[a].assign(streams[a].size(), false);
  for (std::size_t a = 0; a < streams.size(); ++a) {
    for (std::size_t b = a; b < streams.size(); ++b) {
      for (std::size_t i = 0; i + window <= streams[a].size(); ++i) {
        for (std::size_t j = (a == b ? i + 1 : 0); j + window <= streams[b].size(); ++j) {
          bool same = true;
          for (std::size_t k = 0; k < window && same; ++k) same = eq(a, i + k, b, j + k);
          if (!same) continue;
          for (std::size_t k = 0; k < window; ++k) {
            dup[a][i + k] = true;
            dup[b][j + k] = true;
          }
          if (i > 0 && j > 0 && eq(a, i - 1, b, j - 1)) continue;  // not left-maximal
          std::size_t len = window;
          while (i + len < streams[a].size() && j + len < streams[b].size() && eq(a, i + len, b, j + len)) ++len;
          out.blocks.push_back({files[a].path, i, files[b].path, j, len});
        }
      }
    }
  }
  for (std::size_t a = 0; a < streams.size(); ++a) {
    std::set<int> lines;
    for (std::size_t i = 0; i < streams[a].size(); ++i) {
      if (dup[a][i]) lines.insert(streams[a][i].line);
    }
    out.duplicated_lines += lines.size();
  }
  std::sort(out.blocks.begin(), out.blocks.end());
  return out;
}

}  // namespace oracle

#endif  // FASTFAIL_TESTS_ORACLES_HPP_
