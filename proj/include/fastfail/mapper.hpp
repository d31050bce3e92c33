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

#ifndef FASTFAIL_MAPPER_HPP_
#define FASTFAIL_MAPPER_HPP_

/// @file mapper.hpp
///
/// The suite <-> source-file mapping database. Edges come from coverage
/// runs: a suite that executed a file is mapped to it. The database only
/// ever holds Code files; configuration, documentation and test-asset
/// files are filtered out by classify_path() before they reach it.

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fastfail/common.hpp"

namespace fastfail {

enum class Classification { kCode, kConfig, kInfo, kTestAsset };
enum class SuiteKind { kUnit, kFunctional };

std::string_view to_string(Classification c);
Classification classification_from_string(std::string_view s);
std::string_view to_string(SuiteKind k);
SuiteKind suite_kind_from_string(std::string_view s);

struct FileRecord {
  std::string path;
  std::string content_hash;
  Classification classification = Classification::kCode;
  Timestamp first_seen{};
  Timestamp last_modified{};

  bool operator==(const FileRecord&) const = default;
};

struct TestSuiteRecord {
  std::string id;
  SuiteKind kind = SuiteKind::kFunctional;
  std::vector<std::string> command;
  // Empty means the suite is selected and run as a whole.
  std::vector<std::string> case_ids;

  bool operator==(const TestSuiteRecord&) const = default;
};

/// Identity of an edge. `case_id` is empty for suite-level edges; unit
/// suites that report per-case coverage get one edge per (case, path).
struct EdgeKey {
  std::string suite_id;
  std::string path;
  std::string case_id;

  auto operator<=>(const EdgeKey&) const = default;
};

struct MapEdge {
  std::string suite_id;
  std::string path;
  std::string case_id;
  std::string provenance;  // coverage run id
  Timestamp recorded_at{};

  EdgeKey key() const { return {suite_id, path, case_id}; }
  bool operator==(const MapEdge&) const = default;
};

struct LineHit {
  int number = 0;
  std::uint64_t hits = 0;

  bool operator==(const LineHit&) const = default;
};

struct CoveredFile {
  std::string path;
  // Sum of line hits for the file.
  std::uint64_t hit_lines = 0;
  // Per-line detail when the source format has it; empty for the text
  // fallback format.
  std::vector<LineHit> lines;

  bool operator==(const CoveredFile&) const = default;
};

struct CoverageRecord {
  std::string suite_id;
  std::string case_id;
  std::string run_id;
  std::vector<CoveredFile> covered;

  bool operator==(const CoverageRecord&) const = default;
};

struct ClassifierConfig {
  std::set<std::string> source_extensions;
  // Directory prefixes ("tests/data") whose contents are test assets.
  std::vector<std::string> test_asset_roots;
  // Directory names under which .json/.xml files are configuration.
  std::set<std::string> config_dirs;

  static ClassifierConfig defaults();
};

/// Deterministic classification by name and extension. Throws kValidation
/// for empty paths and paths containing `..`.
Classification classify_path(std::string_view path,
                             const ClassifierConfig& config = ClassifierConfig::defaults());

class MapperDatabase {
 public:
  static constexpr int kSchemaVersion = 1;

  Timestamp generated_at() const { return generated_at_; }
  void set_generated_at(Timestamp t) { generated_at_ = t; }

  const std::map<std::string, FileRecord>& files() const { return files_; }
  const std::map<std::string, TestSuiteRecord>& suites() const { return suites_; }
  const std::map<EdgeKey, MapEdge>& edges() const { return edges_; }

  const FileRecord* find_file(std::string_view path) const;
  const TestSuiteRecord* find_suite(std::string_view id) const;

  /// Inserts or replaces. Only Code files are accepted (kIntegrity).
  void upsert_file(FileRecord file);
  /// Removes the file and every edge touching it. No-op if absent.
  void remove_file(std::string_view path);

  /// Registers a suite. Re-registering the same id with a different kind is
  /// a kConflict; with the same kind it replaces command and cases.
  void add_suite(TestSuiteRecord suite);

  /// Inserts or refreshes an edge. Both endpoints must exist (kIntegrity).
  void upsert_edge(MapEdge edge);

  /// Edges incident to `path`, in key order.
  std::vector<EdgeKey> edges_for_path(std::string_view path) const;
  bool has_edges(std::string_view path) const;

  bool operator==(const MapperDatabase& other) const;

 private:
  Timestamp generated_at_{};
  std::map<std::string, FileRecord> files_;
  std::map<std::string, TestSuiteRecord> suites_;
  std::map<EdgeKey, MapEdge> edges_;
  // Derived index: path -> incident edge keys.
  std::map<std::string, std::set<EdgeKey>, std::less<>> by_path_;
};

struct ListingEntry {
  std::string path;
  std::string hash;
};

struct IngestReport {
  std::size_t edges_written = 0;
  std::size_t skipped_non_code = 0;
  std::size_t skipped_below_threshold = 0;
  // Covered paths the database has no file record for.
  std::vector<std::string> unknown_paths;
};

struct IngestOptions {
  std::uint64_t threshold = 1;
  bool auto_register = false;
  SuiteKind auto_register_kind = SuiteKind::kFunctional;
  Timestamp now{};
  ClassifierConfig classifier = ClassifierConfig::defaults();
  IngestReport* report = nullptr;
};

MapperDatabase ingest_coverage(MapperDatabase db, const CoverageRecord& record,
                               const IngestOptions& options);

/// Builds a database from scratch. Suites come from `catalog` first, then
/// any suite named only by a coverage record is auto-registered.
MapperDatabase bootstrap(const std::vector<CoverageRecord>& records,
                         const std::vector<ListingEntry>& listing,
                         const std::vector<TestSuiteRecord>& catalog,
                         const IngestOptions& options);

struct ScanDelta {
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::vector<std::string> modified;
  std::vector<std::string> unchanged;

  bool empty() const { return added.empty() && removed.empty() && modified.empty(); }
  bool operator==(const ScanDelta&) const = default;
};

struct ReconcileResult {
  MapperDatabase db;
  ScanDelta delta;
};

/// Brings the file set in line with a fresh listing. Non-Code listing
/// entries are ignored. generated_at only moves when something changed.
ReconcileResult reconcile(MapperDatabase db, const std::vector<ListingEntry>& listing,
                          Timestamp now,
                          const ClassifierConfig& classifier = ClassifierConfig::defaults());

std::set<std::string> suites_for_files(const MapperDatabase& db,
                                       const std::set<std::string>& paths);

/// Canonical JSON document (sorted keys, sorted arrays, trailing newline).
std::string save(const MapperDatabase& db);
/// Throws kParse (with byte offset) or kVersion or kIntegrity.
MapperDatabase load(std::string_view document);

/// Recursively lists regular files under `root` with content hashes,
/// skipping `.git` and any directory in `exclude`.
std::vector<ListingEntry> scan_directory(const std::filesystem::path& root,
                                         const std::vector<std::filesystem::path>& exclude = {});

}  // namespace fastfail

#endif  // FASTFAIL_MAPPER_HPP_
