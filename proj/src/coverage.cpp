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

#include "fastfail/coverage.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "fastfail/error.hpp"

namespace fastfail {

namespace pt = boost::property_tree;

namespace {

// Visits every <class> element at any depth.
template <typename Fn>
void for_each_class(const pt::ptree& node, Fn&& fn) {
  for (const auto& [name, child] : node) {
    if (name == "class") {
      fn(child);
    } else if (name != "<xmlattr>" && name != "<xmlcomment>") {
      for_each_class(child, fn);
    }
  }
}

std::uint64_t parse_count(const std::string& text, std::string_view what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, "coverage: invalid " + std::string(what) + " '" + text + "'");
  }
}

}  // namespace

CoverageRecord parse_cobertura(std::string_view xml, std::string suite_id,
                               std::string run_id) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::kParse, "cobertura: line " + std::to_string(e.line()) + ": " +
                                       e.message());
  }
  if (tree.find("coverage") == tree.not_found()) {
    throw Error(ErrorKind::kParse, "cobertura: missing <coverage> root element");
  }

  CoverageRecord record;
  record.suite_id = std::move(suite_id);
  record.run_id = std::move(run_id);
  std::map<std::string, std::size_t> index;
  for_each_class(tree.get_child("coverage"), [&](const pt::ptree& cls) {
    const auto filename = cls.get_optional<std::string>("<xmlattr>.filename");
    if (!filename) throw Error(ErrorKind::kParse, "cobertura: <class> without filename");
    const std::string path = normalize_path(*filename);
    auto [it, inserted] = index.emplace(path, record.covered.size());
    if (inserted) record.covered.push_back(CoveredFile{path, 0, {}});
    CoveredFile& file = record.covered[it->second];
    if (auto lines = cls.get_child_optional("lines")) {
      for (const auto& [name, line] : *lines) {
        if (name != "line") continue;
        const auto number = parse_count(line.get<std::string>("<xmlattr>.number", ""), "line number");
        const auto hits = parse_count(line.get<std::string>("<xmlattr>.hits", ""), "hit count");
        file.hit_lines += hits;
        file.lines.push_back(LineHit{static_cast<int>(number), hits});
      }
    }
  });
  for (auto& file : record.covered) {
    std::sort(file.lines.begin(), file.lines.end(),
              [](const LineHit& a, const LineHit& b) { return a.number < b.number; });
  }
  return record;
}

std::pair<std::string, std::string> split_case_ref(std::string_view ref) {
  const auto sep = ref.find("::");
  if (sep == std::string_view::npos) return {std::string(ref), {}};
  return {std::string(ref.substr(0, sep)), std::string(ref.substr(sep + 2))};
}

std::vector<CoverageRecord> parse_coverage_text(std::string_view text,
                                                const std::string& run_id) {
  std::vector<CoverageRecord> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw Error(ErrorKind::kParse, "coverage text: line " + std::to_string(i + 1) +
                                         ": expected suite<TAB>path<TAB>hits");
    }
    auto ref = split_case_ref(line.substr(0, t1));
    if (ref.first.empty()) {
      throw Error(ErrorKind::kParse, "coverage text: line " + std::to_string(i + 1) + ": empty suite id");
    }
    std::string path;
    std::uint64_t hits = 0;
    try {
      path = normalize_path(line.substr(t1 + 1, t2 - t1 - 1));
      hits = parse_count(line.substr(t2 + 1), "hit count");
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, "coverage text: line " + std::to_string(i + 1) + ": " + e.what());
    }
    auto [it, inserted] = index.emplace(ref, out.size());
    if (inserted) out.push_back(CoverageRecord{ref.first, ref.second, run_id, {}});
    auto& covered = out[it->second].covered;
    auto file = std::find_if(covered.begin(), covered.end(),
                             [&](const CoveredFile& f) { return f.path == path; });
    if (file == covered.end()) {
      covered.push_back(CoveredFile{path, hits, {}});
    } else {
      file->hit_lines += hits;
    }
  }
  return out;
}

namespace {

std::string xml_escape(std::string_view s) {
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

}  // namespace

std::string render_cobertura(const CoverageRecord& record) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" ?>\n"
      << "<coverage version=\"1\">\n"
      << "  <packages>\n"
      << "    <package name=\"" << xml_escape(record.suite_id) << "\">\n"
      << "      <classes>\n";
  for (const auto& file : record.covered) {
    out << "        <class name=\"" << xml_escape(file.path) << "\" filename=\""
        << xml_escape(file.path) << "\">\n"
        << "          <lines>\n";
    if (file.lines.empty()) {
      // Keep the hit total when only a sum is known.
      out << "            <line number=\"1\" hits=\"" << file.hit_lines << "\"/>\n";
    }
    for (const auto& line : file.lines) {
      out << "            <line number=\"" << line.number << "\" hits=\"" << line.hits << "\"/>\n";
    }
    out << "          </lines>\n"
        << "        </class>\n";
  }
  out << "      </classes>\n"
      << "    </package>\n"
      << "  </packages>\n"
      << "</coverage>\n";
  return out.str();
}

std::vector<CoverageRecord> load_coverage_dir(const std::filesystem::path& dir,
                                              const std::string& run_id) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::kIo, "coverage directory '" + dir.string() + "' not found");
  }
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".xml" || ext == ".tsv" || ext == ".cov") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());

  std::vector<CoverageRecord> out;
  for (const auto& file : inputs) {
    const std::string text = read_file(file);
    try {
      if (file.extension() == ".xml") {
        auto [suite, kase] = split_case_ref(file.stem().string());
        CoverageRecord rec = parse_cobertura(text, suite, run_id);
        rec.case_id = kase;
        out.push_back(std::move(rec));
      } else {
        for (auto& rec : parse_coverage_text(text, run_id)) out.push_back(std::move(rec));
      }
    } catch (const Error& e) {
      throw Error(e.kind(), file.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fastfail
