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

#ifndef FASTFAIL_VCS_HPP_
#define FASTFAIL_VCS_HPP_

/// @file vcs.hpp
///
/// Linear commit history, net change computation over commit ranges and
/// the adapter contract used to talk to a real version-control system.
///
/// Journal text format, one block per commit, blocks separated by one
/// blank line:
///
///     commit <id> parent <id|-> author <addr> time <unix-seconds>
///     A <path>
///     M <path>
///     D <path>
///     R <old> -> <new>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fastfail/common.hpp"

namespace fastfail {

enum class ChangeType { kAdded, kModified, kDeleted, kRenamed };

struct Change {
  std::string path;
  ChangeType type = ChangeType::kModified;
  std::string old_path;  // set only for kRenamed

  bool operator==(const Change&) const = default;
};

struct ChangeSet {
  std::string id;
  std::optional<std::string> parent;
  std::string author;
  Timestamp timestamp{};
  std::vector<Change> changes;

  bool operator==(const ChangeSet&) const = default;
};

/// Ordered (oldest first) linear history. Construction and append() enforce
/// the parent chain, id uniqueness and non-decreasing timestamps.
class CommitJournal {
 public:
  CommitJournal() = default;
  explicit CommitJournal(std::vector<ChangeSet> commits);

  const std::vector<ChangeSet>& commits() const { return commits_; }
  std::size_t size() const { return commits_.size(); }
  bool empty() const { return commits_.empty(); }
  const ChangeSet& head() const;

  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Throws kLookup for unknown ids.
  std::size_t require_index(std::string_view id) const;
  const ChangeSet& at(std::string_view id) const { return commits_[require_index(id)]; }

  void append(ChangeSet commit);

  bool operator==(const CommitJournal& other) const { return commits_ == other.commits_; }

 private:
  std::vector<ChangeSet> commits_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws kParse (with 1-based line number) or kIntegrity.
CommitJournal parse_journal(std::string_view text);
std::string render_journal(const CommitJournal& journal);
std::string render_changeset(const ChangeSet& commit);

/// Net effect of a sequence of commits, keyed by the final path.
using NetChanges = std::map<std::string, Change>;

NetChanges net_changes(std::span<const ChangeSet> commits);

/// Net changes over (from, to]. A missing `from` means "before the root".
NetChanges changes_between(const CommitJournal& journal,
                           const std::optional<std::string>& from_exclusive,
                           std::string_view to_inclusive);

/// Path -> content version (id of the commit that last wrote it).
using FileTree = std::map<std::string, std::string>;

void apply_changeset(FileTree& tree, const ChangeSet& commit);

/// Applies a net change set; written paths get `version`.
void apply_net_changes(FileTree& tree, const NetChanges& changes, const std::string& version);

FileTree materialize(const CommitJournal& journal, std::string_view commit_id,
                     FileTree base_tree = {});

/// Contract the orchestrator uses to reach version control.
class VcsAdapter {
 public:
  virtual ~VcsAdapter() = default;

  /// Whole mainline history, oldest first. kTransientIo when unreachable.
  virtual CommitJournal history() = 0;

  /// Writes the tree of `commit` into `dir`.
  virtual void checkout(std::string_view commit, const std::filesystem::path& dir) = 0;
};

/// Commits strictly after `since` (everything when empty), oldest first.
std::vector<ChangeSet> poll(VcsAdapter& adapter, const std::optional<std::string>& since);

/// Adapter over a journal file. The file is re-read on every call so it can
/// grow underneath a running watcher.
class JournalAdapter final : public VcsAdapter {
 public:
  /// `content_root`, when set, supplies file contents for checkout();
  /// otherwise files contain their version tag.
  explicit JournalAdapter(std::filesystem::path journal_file,
                          std::filesystem::path content_root = {});

  CommitJournal history() override;
  void checkout(std::string_view commit, const std::filesystem::path& dir) override;

 private:
  std::filesystem::path journal_file_;
  std::filesystem::path content_root_;
};

/// Adapter driving the `git` command-line client on a local repository.
/// Follows first parents, so merges appear as single mainline commits.
class GitAdapter final : public VcsAdapter {
 public:
  explicit GitAdapter(std::filesystem::path repo);

  CommitJournal history() override;
  void checkout(std::string_view commit, const std::filesystem::path& dir) override;

 private:
  std::filesystem::path repo_;
};

}  // namespace fastfail

#endif  // FASTFAIL_VCS_HPP_
