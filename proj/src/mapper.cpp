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

#include "fastfail/mapper.hpp"

#include <algorithm>
#include <cctype>

#include "fastfail/error.hpp"
#include "json.hpp"

namespace fastfail {

using nlohmann::json;

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kCode: return "code";
    case Classification::kConfig: return "config";
    case Classification::kInfo: return "info";
    case Classification::kTestAsset: return "test-asset";
  }
  return "info";
}

Classification classification_from_string(std::string_view s) {
  if (s == "code") return Classification::kCode;
  if (s == "config") return Classification::kConfig;
  if (s == "info") return Classification::kInfo;
  if (s == "test-asset") return Classification::kTestAsset;
  throw Error(ErrorKind::kParse, "unknown classification '" + std::string(s) + "'");
}

std::string_view to_string(SuiteKind k) {
  return k == SuiteKind::kUnit ? "unit" : "functional";
}

SuiteKind suite_kind_from_string(std::string_view s) {
  if (s == "unit") return SuiteKind::kUnit;
  if (s == "functional") return SuiteKind::kFunctional;
  throw Error(ErrorKind::kParse, "unknown suite kind '" + std::string(s) + "'");
}

ClassifierConfig ClassifierConfig::defaults() {
  ClassifierConfig c;
  c.source_extensions = {".c",  ".cc",  ".cpp",   ".cxx", ".h",  ".hh", ".hpp",
                         ".hxx", ".java", ".kt",   ".scala", ".groovy", ".py",
                         ".js", ".jsx", ".ts",   ".tsx", ".go", ".rs", ".cs",
                         ".rb", ".php", ".swift", ".m",  ".mm", ".sh"};
  c.test_asset_roots = {"tests/data", "test/data", "testdata", "src/test/resources"};
  c.config_dirs = {"conf", "config"};
  return c;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

bool under_root(std::string_view path, std::string_view root) {
  if (root.empty()) return false;
  return path.size() > root.size() && path.substr(0, root.size()) == root &&
         path[root.size()] == '/';
}

}  // namespace

Classification classify_path(std::string_view path, const ClassifierConfig& config) {
  const std::string p = normalize_path(path);
  for (const auto& root : config.test_asset_roots) {
    if (under_root(p, root)) return Classification::kTestAsset;
  }
  const auto slash = p.rfind('/');
  const std::string base = slash == std::string::npos ? p : p.substr(slash + 1);
  const auto dot = base.rfind('.');
  const std::string ext = (dot == std::string::npos || dot == 0) ? "" : lower(base.substr(dot));
  const std::string stem = dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);

  static const std::set<std::string> kConfigExt = {".cfg", ".conf", ".ini",
                                                   ".yaml", ".yml", ".properties"};
  if (kConfigExt.count(ext)) return Classification::kConfig;
  if (ext == ".json" || ext == ".xml") {
    std::size_t pos = 0;
    while (slash != std::string::npos && pos < slash) {
      std::size_t next = p.find('/', pos);
      if (config.config_dirs.count(p.substr(pos, next - pos))) {
        return Classification::kConfig;
      }
      pos = next + 1;
    }
  }
  if (ext == ".md" || ext == ".txt" || ext == ".rst") return Classification::kInfo;
  const std::string upper_stem = [&] {
    std::string s = stem;
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }();
  if (upper_stem == "LICENSE" || upper_stem == "NOTICE") return Classification::kInfo;
  if (!ext.empty() && config.source_extensions.count(ext)) return Classification::kCode;
  return Classification::kInfo;
}

// --- MapperDatabase --------------------------------------------------------

const FileRecord* MapperDatabase::find_file(std::string_view path) const {
  auto it = files_.find(std::string(path));
  return it == files_.end() ? nullptr : &it->second;
}

const TestSuiteRecord* MapperDatabase::find_suite(std::string_view id) const {
  auto it = suites_.find(std::string(id));
  return it == suites_.end() ? nullptr : &it->second;
}

void MapperDatabase::upsert_file(FileRecord file) {
  if (!is_normalized_path(file.path)) {
    throw Error(ErrorKind::kValidation, "file path not normalized '" + file.path + "'");
  }
  if (file.classification != Classification::kCode) {
    throw Error(ErrorKind::kIntegrity, "only code files are mapped: '" + file.path + "'");
  }
  if (file.content_hash.empty()) {
    throw Error(ErrorKind::kIntegrity, "missing content hash for '" + file.path + "'");
  }
  if (file.first_seen > file.last_modified) {
    throw Error(ErrorKind::kIntegrity, "first_seen after last_modified for '" + file.path + "'");
  }
  files_[file.path] = std::move(file);
}

void MapperDatabase::remove_file(std::string_view path) {
  auto idx = by_path_.find(path);
  if (idx != by_path_.end()) {
    for (const auto& key : idx->second) edges_.erase(key);
    by_path_.erase(idx);
  }
  files_.erase(std::string(path));
}

void MapperDatabase::add_suite(TestSuiteRecord suite) {
  if (suite.id.empty()) {
    throw Error(ErrorKind::kValidation, "suite id is empty");
  }
  if (suite.command.empty()) {
    throw Error(ErrorKind::kValidation, "suite '" + suite.id + "' has an empty command");
  }
  auto it = suites_.find(suite.id);
  if (it != suites_.end()) {
    if (it->second.kind != suite.kind) {
      throw Error(ErrorKind::kConflict, "suite '" + suite.id + "' registered as both " +
                                            std::string(to_string(it->second.kind)) + " and " +
                                            std::string(to_string(suite.kind)));
    }
    it->second = std::move(suite);
    return;
  }
  suites_.emplace(suite.id, std::move(suite));
}

void MapperDatabase::upsert_edge(MapEdge edge) {
  const TestSuiteRecord* suite = find_suite(edge.suite_id);
  if (suite == nullptr) {
    throw Error(ErrorKind::kIntegrity, "edge references unknown suite '" + edge.suite_id + "'");
  }
  if (!edge.case_id.empty() &&
      std::find(suite->case_ids.begin(), suite->case_ids.end(), edge.case_id) ==
          suite->case_ids.end()) {
    throw Error(ErrorKind::kIntegrity, "edge references unknown case '" + edge.case_id +
                                           "' of suite '" + edge.suite_id + "'");
  }
  if (find_file(edge.path) == nullptr) {
    throw Error(ErrorKind::kIntegrity, "edge references unknown file '" + edge.path + "'");
  }
  EdgeKey key = edge.key();
  by_path_[edge.path].insert(key);
  edges_[std::move(key)] = std::move(edge);
}

std::vector<EdgeKey> MapperDatabase::edges_for_path(std::string_view path) const {
  auto it = by_path_.find(path);
  if (it == by_path_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

bool MapperDatabase::has_edges(std::string_view path) const {
  auto it = by_path_.find(path);
  return it != by_path_.end() && !it->second.empty();
}

bool MapperDatabase::operator==(const MapperDatabase& other) const {
  return generated_at_ == other.generated_at_ && files_ == other.files_ &&
         suites_ == other.suites_ && edges_ == other.edges_;
}

// --- operations ------------------------------------------------------------

MapperDatabase ingest_coverage(MapperDatabase db, const CoverageRecord& record,
                               const IngestOptions& options) {
  if (options.threshold < 1) {
    throw Error(ErrorKind::kValidation, "coverage threshold must be >= 1");
  }
  if (db.find_suite(record.suite_id) == nullptr) {
    if (!options.auto_register) {
      throw Error(ErrorKind::kUnknownSuite, "coverage for unknown suite '" + record.suite_id + "'");
    }
    TestSuiteRecord suite;
    suite.id = record.suite_id;
    suite.kind = options.auto_register_kind;
    suite.command = {record.suite_id};
    if (!record.case_id.empty()) suite.case_ids = {record.case_id};
    db.add_suite(std::move(suite));
  } else if (!record.case_id.empty()) {
    const TestSuiteRecord* suite = db.find_suite(record.suite_id);
    if (std::find(suite->case_ids.begin(), suite->case_ids.end(), record.case_id) ==
        suite->case_ids.end()) {
      if (!options.auto_register) {
        throw Error(ErrorKind::kUnknownSuite, "coverage for unknown case '" + record.case_id +
                                                  "' of suite '" + record.suite_id + "'");
      }
      TestSuiteRecord extended = *suite;
      extended.case_ids.push_back(record.case_id);
      db.add_suite(std::move(extended));
    }
  }

  IngestReport local;
  IngestReport& report = options.report != nullptr ? *options.report : local;
  for (const auto& covered : record.covered) {
    const std::string path = normalize_path(covered.path);
    if (classify_path(path, options.classifier) != Classification::kCode) {
      ++report.skipped_non_code;
      continue;
    }
    if (covered.hit_lines < options.threshold) {
      ++report.skipped_below_threshold;
      continue;
    }
    if (db.find_file(path) == nullptr) {
      report.unknown_paths.push_back(path);
      continue;
    }
    db.upsert_edge(MapEdge{record.suite_id, path, record.case_id, record.run_id, options.now});
    ++report.edges_written;
  }
  db.set_generated_at(options.now);
  return db;
}

MapperDatabase bootstrap(const std::vector<CoverageRecord>& records,
                         const std::vector<ListingEntry>& listing,
                         const std::vector<TestSuiteRecord>& catalog,
                         const IngestOptions& options) {
  MapperDatabase db;
  for (const auto& entry : listing) {
    const std::string path = normalize_path(entry.path);
    if (classify_path(path, options.classifier) != Classification::kCode) continue;
    db.upsert_file(FileRecord{path, entry.hash, Classification::kCode, options.now, options.now});
  }
  for (const auto& suite : catalog) db.add_suite(suite);
  IngestOptions ingest = options;
  ingest.auto_register = true;
  for (const auto& record : records) {
    db = ingest_coverage(std::move(db), record, ingest);
  }
  db.set_generated_at(options.now);
  return db;
}

ReconcileResult reconcile(MapperDatabase db, const std::vector<ListingEntry>& listing,
                          Timestamp now, const ClassifierConfig& classifier) {
  std::map<std::string, std::string> current;
  for (const auto& entry : listing) {
    std::string path = normalize_path(entry.path);
    if (classify_path(path, classifier) != Classification::kCode) continue;
    current[std::move(path)] = entry.hash;
  }

  ScanDelta delta;
  std::vector<std::string> known;
  known.reserve(db.files().size());
  for (const auto& [path, _] : db.files()) known.push_back(path);
  for (const auto& path : known) {
    if (!current.count(path)) delta.removed.push_back(path);
  }
  for (const auto& [path, hash] : current) {
    const FileRecord* rec = db.find_file(path);
    if (rec == nullptr) {
      delta.added.push_back(path);
    } else if (rec->content_hash != hash) {
      delta.modified.push_back(path);
    } else {
      delta.unchanged.push_back(path);
    }
  }

  for (const auto& path : delta.removed) db.remove_file(path);
  for (const auto& path : delta.added) {
    db.upsert_file(FileRecord{path, current[path], Classification::kCode, now, now});
  }
  for (const auto& path : delta.modified) {
    FileRecord rec = *db.find_file(path);
    rec.content_hash = current[path];
    rec.last_modified = std::max(now, rec.first_seen);
    db.upsert_file(std::move(rec));
  }
  if (!delta.empty()) db.set_generated_at(now);
  return {std::move(db), std::move(delta)};
}

std::set<std::string> suites_for_files(const MapperDatabase& db,
                                       const std::set<std::string>& paths) {
  std::set<std::string> out;
  for (const auto& path : paths) {
    for (const auto& key : db.edges_for_path(path)) out.insert(key.suite_id);
  }
  return out;
}

// --- persistence -------------------------------------------------------------

std::string save(const MapperDatabase& db) {
  json files = json::array();
  for (const auto& [path, f] : db.files()) {
    files.push_back({{"path", f.path},
                     {"hash", f.content_hash},
                     {"class", to_string(f.classification)},
                     {"first_seen", format_rfc3339(f.first_seen)},
                     {"last_modified", format_rfc3339(f.last_modified)}});
  }
  json suites = json::array();
  for (const auto& [id, s] : db.suites()) {
    suites.push_back({{"id", s.id},
                      {"kind", to_string(s.kind)},
                      {"command", s.command},
                      {"cases", s.case_ids}});
  }
  json edges = json::array();
  for (const auto& [key, e] : db.edges()) {
    json edge = {{"suite", e.suite_id},
                 {"path", e.path},
                 {"provenance", e.provenance},
                 {"recorded_at", format_rfc3339(e.recorded_at)}};
    if (!e.case_id.empty()) edge["case"] = e.case_id;
    edges.push_back(std::move(edge));
  }
  json doc = {{"schema_version", MapperDatabase::kSchemaVersion},
              {"hash_algo", kHashAlgorithm},
              {"generated_at", format_rfc3339(db.generated_at())},
              {"files", std::move(files)},
              {"suites", std::move(suites)},
              {"edges", std::move(edges)}};
  return doc.dump(2) + "\n";
}

namespace {

template <typename T>
T field(const json& obj, const char* name, std::string_view where) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw Error(ErrorKind::kParse,
                std::string(where) + ": missing field '" + name + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse,
                std::string(where) + ": bad field '" + name + "': " + e.what());
  }
}

}  // namespace

MapperDatabase load(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, "mapper db: byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "mapper db: top level is not an object");
  const int version = field<int>(doc, "schema_version", "mapper db");
  if (version != MapperDatabase::kSchemaVersion) {
    throw Error(ErrorKind::kVersion, "mapper db: schema_version " + std::to_string(version) +
                                         " unsupported (expected " +
                                         std::to_string(MapperDatabase::kSchemaVersion) + ")");
  }
  const auto algo = field<std::string>(doc, "hash_algo", "mapper db");
  if (algo != kHashAlgorithm) {
    throw Error(ErrorKind::kVersion, "mapper db: hash_algo '" + algo + "' unsupported");
  }

  MapperDatabase db;
  const auto files = field<json>(doc, "files", "mapper db");
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string where = "files[" + std::to_string(i) + "]";
    const json& f = files[i];
    FileRecord rec;
    rec.path = field<std::string>(f, "path", where);
    rec.content_hash = field<std::string>(f, "hash", where);
    rec.classification = classification_from_string(field<std::string>(f, "class", where));
    rec.first_seen = parse_rfc3339(field<std::string>(f, "first_seen", where));
    rec.last_modified = parse_rfc3339(field<std::string>(f, "last_modified", where));
    if (db.find_file(rec.path) != nullptr) {
      throw Error(ErrorKind::kIntegrity, where + ": duplicate path '" + rec.path + "'");
    }
    db.upsert_file(std::move(rec));
  }
  const auto suites = field<json>(doc, "suites", "mapper db");
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const std::string where = "suites[" + std::to_string(i) + "]";
    const json& s = suites[i];
    TestSuiteRecord rec;
    rec.id = field<std::string>(s, "id", where);
    rec.kind = suite_kind_from_string(field<std::string>(s, "kind", where));
    rec.command = field<std::vector<std::string>>(s, "command", where);
    rec.case_ids = field<std::vector<std::string>>(s, "cases", where);
    if (db.find_suite(rec.id) != nullptr) {
      throw Error(ErrorKind::kIntegrity, where + ": duplicate suite id '" + rec.id + "'");
    }
    db.add_suite(std::move(rec));
  }
  const auto edges = field<json>(doc, "edges", "mapper db");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    MapEdge edge;
    edge.suite_id = field<std::string>(e, "suite", where);
    edge.path = field<std::string>(e, "path", where);
    edge.case_id = e.value("case", std::string());
    edge.provenance = field<std::string>(e, "provenance", where);
    edge.recorded_at = parse_rfc3339(field<std::string>(e, "recorded_at", where));
    try {
      db.upsert_edge(std::move(edge));
    } catch (const Error& err) {
      throw Error(err.kind(), where + ": " + err.what());
    }
  }
  db.set_generated_at(parse_rfc3339(field<std::string>(doc, "generated_at", "mapper db")));
  return db;
}

std::vector<ListingEntry> scan_directory(const std::filesystem::path& root,
                                         const std::vector<std::filesystem::path>& exclude) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::kIo, "repository root '" + root.string() + "' is not readable");
  }
  std::vector<fs::path> excluded;
  for (const auto& e : exclude) excluded.push_back(fs::weakly_canonical(e, ec));

  std::vector<ListingEntry> out;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot list '" + root.string() + "': " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw Error(ErrorKind::kIo, "cannot list '" + root.string() + "': " + ec.message());
    const fs::path& p = it->path();
    if (it->is_directory()) {
      const auto canon = fs::weakly_canonical(p, ec);
      if (p.filename() == ".git" ||
          std::find(excluded.begin(), excluded.end(), canon) != excluded.end()) {
        it.disable_recursion_pending();
      }
      continue;
    }
    if (!it->is_regular_file()) continue;
    const std::string rel = fs::relative(p, root).generic_string();
    out.push_back({normalize_path(rel), sha256_file(p)});
  }
  std::sort(out.begin(), out.end(),
            [](const ListingEntry& a, const ListingEntry& b) { return a.path < b.path; });
  return out;
}

}  // namespace fastfail
