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

#include "fastfail/vcs.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "fastfail/error.hpp"
#include "fastfail/process.hpp"

namespace fastfail {

namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n'; });
}

void validate_changeset(const ChangeSet& c) {
  if (c.id.empty() || has_space(c.id)) {
    throw Error(ErrorKind::kIntegrity, "invalid commit id '" + c.id + "'");
  }
  if (c.author.empty() || has_space(c.author)) {
    throw Error(ErrorKind::kIntegrity, "commit " + c.id + ": invalid author '" + c.author + "'");
  }
  std::set<std::string_view> seen;
  for (const auto& ch : c.changes) {
    if (!is_normalized_path(ch.path)) {
      throw Error(ErrorKind::kIntegrity, "commit " + c.id + ": path not normalized '" + ch.path + "'");
    }
    if (!seen.insert(ch.path).second) {
      throw Error(ErrorKind::kIntegrity, "commit " + c.id + ": path listed twice '" + ch.path + "'");
    }
    if (ch.type == ChangeType::kRenamed) {
      if (!is_normalized_path(ch.old_path) || ch.old_path == ch.path) {
        throw Error(ErrorKind::kIntegrity,
                    "commit " + c.id + ": bad rename source '" + ch.old_path + "'");
      }
    } else if (!ch.old_path.empty()) {
      throw Error(ErrorKind::kIntegrity, "commit " + c.id + ": old path on non-rename change");
    }
  }
}

}  // namespace

CommitJournal::CommitJournal(std::vector<ChangeSet> commits) {
  commits_.reserve(commits.size());
  for (auto& c : commits) append(std::move(c));
}

const ChangeSet& CommitJournal::head() const {
  if (commits_.empty()) throw Error(ErrorKind::kLookup, "journal is empty");
  return commits_.back();
}

std::optional<std::size_t> CommitJournal::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CommitJournal::require_index(std::string_view id) const {
  auto idx = index_of(id);
  if (!idx) throw Error(ErrorKind::kLookup, "unknown commit '" + std::string(id) + "'");
  return *idx;
}

void CommitJournal::append(ChangeSet commit) {
  validate_changeset(commit);
  if (index_.count(commit.id)) {
    throw Error(ErrorKind::kIntegrity, "duplicate commit id '" + commit.id + "'");
  }
  if (commits_.empty()) {
    if (commit.parent) {
      throw Error(ErrorKind::kIntegrity,
                  "root commit " + commit.id + " has parent '" + *commit.parent + "'");
    }
  } else {
    const ChangeSet& prev = commits_.back();
    if (!commit.parent || *commit.parent != prev.id) {
      throw Error(ErrorKind::kIntegrity, "commit " + commit.id + ": parent '" +
                                             commit.parent.value_or("-") +
                                             "' breaks the chain (expected " + prev.id + ")");
    }
    if (commit.timestamp < prev.timestamp) {
      throw Error(ErrorKind::kIntegrity, "commit " + commit.id + ": timestamp precedes parent");
    }
  }
  index_.emplace(commit.id, commits_.size());
  commits_.push_back(std::move(commit));
}

// --- text format -------------------------------------------------------------

CommitJournal parse_journal(std::string_view text) {
  CommitJournal journal;
  const auto lines = split_lines(text);
  std::optional<ChangeSet> current;
  std::size_t header_line = 0;

  auto fail = [](std::size_t line, const std::string& what) {
    throw Error(ErrorKind::kParse, "journal line " + std::to_string(line) + ": " + what);
  };
  auto flush = [&] {
    if (!current) return;
    try {
      journal.append(std::move(*current));
    } catch (const Error& e) {
      throw Error(e.kind(), "journal line " + std::to_string(header_line) + ": " + e.what());
    }
    current.reset();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string& line = lines[i];
    if (line.empty()) {
      if (!current) fail(lineno, "unexpected blank line");
      flush();
      continue;
    }
    if (!current) {
      std::istringstream in(line);
      std::string kw_commit, id, kw_parent, parent, kw_author, author, kw_time, time, extra;
      in >> kw_commit >> id >> kw_parent >> parent >> kw_author >> author >> kw_time >> time;
      if (kw_commit != "commit" || kw_parent != "parent" || kw_author != "author" ||
          kw_time != "time" || time.empty() || (in >> extra)) {
        fail(lineno, "expected 'commit <id> parent <id|-> author <addr> time <unix-seconds>'");
      }
      long long secs = 0;
      try {
        std::size_t used = 0;
        secs = std::stoll(time, &used);
        if (used != time.size()) throw std::invalid_argument(time);
      } catch (const std::exception&) {
        fail(lineno, "bad time '" + time + "'");
      }
      current = ChangeSet{id, parent == "-" ? std::nullopt : std::optional<std::string>(parent),
                          author, from_unix_seconds(secs), {}};
      header_line = lineno;
      continue;
    }
    if (line.size() < 3 || line[1] != ' ') fail(lineno, "malformed change line '" + line + "'");
    const std::string rest = line.substr(2);
    Change change;
    try {
      switch (line[0]) {
        case 'A': change = {normalize_path(rest), ChangeType::kAdded, {}}; break;
        case 'M': change = {normalize_path(rest), ChangeType::kModified, {}}; break;
        case 'D': change = {normalize_path(rest), ChangeType::kDeleted, {}}; break;
        case 'R': {
          const auto arrow = rest.find(" -> ");
          if (arrow == std::string::npos) fail(lineno, "rename without ' -> '");
          change = {normalize_path(rest.substr(arrow + 4)), ChangeType::kRenamed,
                    normalize_path(rest.substr(0, arrow))};
          break;
        }
        default: fail(lineno, "unknown change kind '" + std::string(1, line[0]) + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kParse) throw;
      fail(lineno, e.what());
    }
    if (change.type == ChangeType::kRenamed && change.old_path == change.path) {
      fail(lineno, "rename onto itself '" + change.path + "'");
    }
    for (const auto& prior : current->changes) {
      if (prior.path == change.path) {
        fail(lineno, "path listed twice in commit '" + change.path + "'");
      }
    }
    current->changes.push_back(std::move(change));
  }
  flush();
  return journal;
}

std::string render_changeset(const ChangeSet& c) {
  std::string out = "commit " + c.id + " parent " + c.parent.value_or("-") + " author " +
                    c.author + " time " + std::to_string(to_unix_seconds(c.timestamp)) + "\n";
  for (const auto& ch : c.changes) {
    switch (ch.type) {
      case ChangeType::kAdded: out += "A " + ch.path + "\n"; break;
      case ChangeType::kModified: out += "M " + ch.path + "\n"; break;
      case ChangeType::kDeleted: out += "D " + ch.path + "\n"; break;
      case ChangeType::kRenamed: out += "R " + ch.old_path + " -> " + ch.path + "\n"; break;
    }
  }
  return out;
}

std::string render_journal(const CommitJournal& journal) {
  std::string out;
  for (std::size_t i = 0; i < journal.size(); ++i) {
    if (i > 0) out += "\n";
    out += render_changeset(journal.commits()[i]);
  }
  return out;
}

// --- net change algebra ------------------------------------------------------

namespace {

// What currently lives under a path touched in the range.
struct Lineage {
  std::optional<std::string> origin;  // pre-range path, none when created in range
  bool modified = false;
};

}  // namespace

NetChanges net_changes(std::span<const ChangeSet> commits) {
  std::map<std::string, Lineage> live;
  // Names inferred to exist before the range: first touched by anything
  // other than an add.
  std::set<std::string> before;
  std::set<std::string> seen;

  auto first_touch = [&](const std::string& path, bool is_add) {
    if (seen.insert(path).second && !is_add) before.insert(path);
  };
  auto take = [&](const std::string& path) {
    first_touch(path, false);
    auto it = live.find(path);
    if (it != live.end()) {
      Lineage l = std::move(it->second);
      live.erase(it);
      return l;
    }
    return Lineage{path, false};
  };

  for (const auto& commit : commits) {
    for (const auto& ch : commit.changes) {
      switch (ch.type) {
        case ChangeType::kAdded:
          first_touch(ch.path, true);
          live[ch.path] = Lineage{std::nullopt, true};
          break;
        case ChangeType::kModified: {
          Lineage l = take(ch.path);
          l.modified = true;
          live[ch.path] = std::move(l);
          break;
        }
        case ChangeType::kDeleted:
          take(ch.path);
          break;
        case ChangeType::kRenamed: {
          Lineage l = take(ch.old_path);
          first_touch(ch.path, true);
          live[ch.path] = std::move(l);
          break;
        }
      }
    }
  }

  NetChanges net;
  std::set<std::string> moved_from;
  for (const auto& [path, l] : live) {
    if (before.count(path)) {
      if (l.origin != path || l.modified) net[path] = Change{path, ChangeType::kModified, {}};
    } else if (!l.origin) {
      net[path] = Change{path, ChangeType::kAdded, {}};
    } else {
      net[path] = Change{path, ChangeType::kRenamed, *l.origin};
      moved_from.insert(*l.origin);
    }
  }
  for (const auto& path : before) {
    if (!live.count(path) && !moved_from.count(path)) {
      net[path] = Change{path, ChangeType::kDeleted, {}};
    }
  }
  return net;
}

NetChanges changes_between(const CommitJournal& journal,
                           const std::optional<std::string>& from_exclusive,
                           std::string_view to_inclusive) {
  const std::size_t to = journal.require_index(to_inclusive);
  std::size_t begin = 0;
  if (from_exclusive) {
    const std::size_t from = journal.require_index(*from_exclusive);
    if (from > to) {
      throw Error(ErrorKind::kRange, "commit " + *from_exclusive + " comes after " +
                                         std::string(to_inclusive));
    }
    begin = from + 1;
  }
  return net_changes(std::span(journal.commits()).subspan(begin, to + 1 - begin));
}

void apply_changeset(FileTree& tree, const ChangeSet& commit) {
  for (const auto& ch : commit.changes) {
    switch (ch.type) {
      case ChangeType::kAdded:
      case ChangeType::kModified:
        tree[ch.path] = commit.id;
        break;
      case ChangeType::kDeleted:
        tree.erase(ch.path);
        break;
      case ChangeType::kRenamed: {
        auto it = tree.find(ch.old_path);
        std::string version = it == tree.end() ? commit.id : it->second;
        if (it != tree.end()) tree.erase(it);
        tree[ch.path] = std::move(version);
        break;
      }
    }
  }
}

void apply_net_changes(FileTree& tree, const NetChanges& changes, const std::string& version) {
  std::map<std::string, std::string> moved;
  for (const auto& [path, ch] : changes) {
    if (ch.type == ChangeType::kDeleted) {
      tree.erase(path);
    } else if (ch.type == ChangeType::kRenamed) {
      auto it = tree.find(ch.old_path);
      moved[path] = it == tree.end() ? version : it->second;
      if (it != tree.end()) tree.erase(it);
    }
  }
  for (const auto& [path, ch] : changes) {
    if (ch.type == ChangeType::kAdded || ch.type == ChangeType::kModified) {
      tree[path] = version;
    } else if (ch.type == ChangeType::kRenamed) {
      tree[path] = moved[path];
    }
  }
}

FileTree materialize(const CommitJournal& journal, std::string_view commit_id, FileTree base_tree) {
  const std::size_t idx = journal.require_index(commit_id);
  for (std::size_t i = 0; i <= idx; ++i) apply_changeset(base_tree, journal.commits()[i]);
  return base_tree;
}

// --- adapters ------------------------------------------------------------------

std::vector<ChangeSet> poll(VcsAdapter& adapter, const std::optional<std::string>& since) {
  const CommitJournal journal = adapter.history();
  std::size_t begin = 0;
  if (since) begin = journal.require_index(*since) + 1;
  return {journal.commits().begin() + static_cast<std::ptrdiff_t>(begin), journal.commits().end()};
}

JournalAdapter::JournalAdapter(std::filesystem::path journal_file,
                               std::filesystem::path content_root)
    : journal_file_(std::move(journal_file)), content_root_(std::move(content_root)) {}

CommitJournal JournalAdapter::history() {
  std::string text;
  try {
    text = read_file(journal_file_);
  } catch (const Error& e) {
    throw Error(ErrorKind::kTransientIo, e.what());
  }
  return parse_journal(text);
}

void JournalAdapter::checkout(std::string_view commit, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const FileTree tree = materialize(history(), commit);
  for (const auto& [path, version] : tree) {
    const fs::path target = dir / path;
    fs::create_directories(target.parent_path());
    const fs::path source = content_root_.empty() ? fs::path() : content_root_ / path;
    std::error_code ec;
    if (!source.empty() && fs::is_regular_file(source, ec)) {
      fs::copy_file(source, target, fs::copy_options::overwrite_existing);
    } else {
      write_file_atomic(target, "version " + version + "\n");
    }
  }
}

GitAdapter::GitAdapter(std::filesystem::path repo) : repo_(std::move(repo)) {}

CommitJournal GitAdapter::history() {
  ProcessRequest req;
  req.argv = {"git", "-C", repo_.string(), "log", "--reverse", "--first-parent",
              "--diff-merges=first-parent", "-M", "--name-status",
              "--format=%x01%H %P|%ae|%ct", "HEAD"};
  req.timeout = std::chrono::seconds(120);
  const ProcessOutcome out = run_process(req);
  if (!out.spawned || out.timed_out || out.exit_code != 0) {
    throw Error(ErrorKind::kTransientIo,
                "git log failed in '" + repo_.string() + "': " + out.error + out.output);
  }

  std::vector<ChangeSet> commits;
  for (const auto& raw : split_lines(out.output)) {
    if (raw.empty()) continue;
    if (raw[0] == '\x01') {
      // "<hash> <parents...>|<email>|<time>"
      const std::string line = raw.substr(1);
      const auto bar1 = line.find('|');
      const auto bar2 = line.rfind('|');
      std::istringstream ids(line.substr(0, bar1));
      ChangeSet c;
      std::string first_parent;
      ids >> c.id >> first_parent;
      if (!commits.empty()) c.parent = commits.back().id;
      c.author = line.substr(bar1 + 1, bar2 - bar1 - 1);
      if (c.author.empty()) c.author = "unknown";
      c.timestamp = from_unix_seconds(std::stoll(line.substr(bar2 + 1)));
      // Author clocks can go backwards; the journal needs them ordered.
      if (!commits.empty() && c.timestamp < commits.back().timestamp) {
        c.timestamp = commits.back().timestamp;
      }
      commits.push_back(std::move(c));
      continue;
    }
    if (commits.empty()) continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const auto tab = raw.find('\t', pos);
      cols.push_back(raw.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (cols.size() < 2) continue;
    auto& changes = commits.back().changes;
    switch (cols[0][0]) {
      case 'A': changes.push_back({cols[1], ChangeType::kAdded, {}}); break;
      case 'D': changes.push_back({cols[1], ChangeType::kDeleted, {}}); break;
      case 'R':
        if (cols.size() >= 3) changes.push_back({cols[2], ChangeType::kRenamed, cols[1]});
        break;
      default: changes.push_back({cols[1], ChangeType::kModified, {}}); break;
    }
  }
  return CommitJournal(std::move(commits));
}

void GitAdapter::checkout(std::string_view commit, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ProcessRequest req;
  req.argv = {"sh", "-c",
              "git -C " + shell_quote(repo_.string()) + " archive " +
                  shell_quote(std::string(commit)) + " | tar -x -C " + shell_quote(dir.string())};
  req.timeout = std::chrono::seconds(300);
  const ProcessOutcome out = run_process(req);
  if (!out.spawned || out.exit_code != 0) {
    throw Error(ErrorKind::kTransientIo,
                "git checkout of " + std::string(commit) + " failed: " + out.error + out.output);
  }
}

}  // namespace fastfail
