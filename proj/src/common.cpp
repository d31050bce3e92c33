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

#include "fastfail/common.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "fastfail/error.hpp"

namespace fastfail {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kVersion: return "version";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kUnknownSuite: return "unknown-suite";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kState: return "state";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kTransientIo: return "transient-io";
    case ErrorKind::kLex: return "lex";
  }
  return "unknown";
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, s = 0;
  char tail[8] = {};
  const std::string copy(text);
  const int n = std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%7s", &y,
                            &mo, &d, &h, &mi, &s, tail);
  const std::string_view suffix(tail);
  if (n != 7 || (suffix != "Z" && suffix != "+00:00")) {
    throw Error(ErrorKind::kParse, "invalid RFC3339 UTC timestamp '" + copy + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorKind::kParse, "timestamp out of range '" + copy + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

Timestamp from_unix_seconds(long long seconds) {
  return Timestamp{std::chrono::seconds{seconds}};
}

long long to_unix_seconds(Timestamp t) {
  return t.time_since_epoch().count();
}

std::string normalize_path(std::string_view path) {
  if (path.empty()) {
    throw Error(ErrorKind::kValidation, "empty path");
  }
  std::string p(path);
  for (char& c : p) {
    if (c == '\\') c = '/';
  }
  if (p.front() == '/') {
    throw Error(ErrorKind::kValidation, "absolute path '" + p + "'");
  }
  std::string out;
  std::size_t pos = 0;
  while (pos <= p.size()) {
    std::size_t next = p.find('/', pos);
    if (next == std::string::npos) next = p.size();
    const std::string_view seg(p.data() + pos, next - pos);
    if (seg == "..") {
      throw Error(ErrorKind::kValidation, "path escapes root '" + p + "'");
    }
    if (!seg.empty() && seg != ".") {
      if (!out.empty()) out += '/';
      out += seg;
    }
    pos = next + 1;
  }
  if (out.empty()) {
    throw Error(ErrorKind::kValidation, "path has no segments '" + p + "'");
  }
  return out;
}

bool is_normalized_path(std::string_view path) {
  try {
    return normalize_path(path) == path;
  } catch (const Error&) {
    return false;
  }
}

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

std::string to_hex(const unsigned char* data, unsigned len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error(ErrorKind::kIo, "sha256 digest failed");
  }
  return to_hex(md.data(), len);
}

std::string sha256_file(const std::filesystem::path& file) {
  return sha256_hex(read_file(file));
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot read '" + file.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& file,
                       std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(ErrorKind::kIo, "short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, file, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot rename into '" + file.string() + "': " + ec.message());
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::size_t end = nl;
    if (end > pos && text[end - 1] == '\r') --end;
    lines.emplace_back(text.substr(pos, end - pos));
    pos = nl + 1;
  }
  return lines;
}

}  // namespace fastfail
