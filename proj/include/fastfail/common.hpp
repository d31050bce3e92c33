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

#ifndef FASTFAIL_COMMON_HPP_
#define FASTFAIL_COMMON_HPP_

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fastfail {

/// UTC instant with one-second resolution; everything persisted uses this.
using Timestamp = std::chrono::sys_seconds;

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_rfc3339(Timestamp t);

/// Accepts `YYYY-MM-DDTHH:MM:SSZ` (and a `+00:00` suffix). Throws kParse.
Timestamp parse_rfc3339(std::string_view text);

Timestamp from_unix_seconds(long long seconds);
long long to_unix_seconds(Timestamp t);

/// Time source. Pipelines take one so tests can pin or advance time.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::system_clock::time_point now() const = 0;

  Timestamp now_seconds() const {
    return std::chrono::time_point_cast<std::chrono::seconds>(now());
  }
};

class SystemClock final : public Clock {
 public:
  std::chrono::system_clock::time_point now() const override {
    return std::chrono::system_clock::now();
  }
};

/// Clock that only moves when told to.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start) : now_(start) {}

  std::chrono::system_clock::time_point now() const override { return now_; }
  void advance(std::chrono::system_clock::duration d) { now_ += d; }
  void set(std::chrono::system_clock::time_point t) { now_ = t; }

 private:
  std::chrono::system_clock::time_point now_;
};

/// Normalizes a repository-relative path: backslashes become slashes,
/// `.` and empty segments are dropped. Throws kValidation for empty
/// input, absolute paths and `..` segments.
std::string normalize_path(std::string_view path);

/// True when `path` is already in normalized form.
bool is_normalized_path(std::string_view path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& file);

inline constexpr std::string_view kHashAlgorithm = "sha256";

std::string read_file(const std::filesystem::path& file);

/// Writes through a sibling temp file and renames, so readers never see a
/// half-written file.
void write_file_atomic(const std::filesystem::path& file,
                       std::string_view contents);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace fastfail

#endif  // FASTFAIL_COMMON_HPP_
