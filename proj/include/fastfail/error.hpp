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

#ifndef FASTFAIL_ERROR_HPP_
#define FASTFAIL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fastfail {

/// Broad failure categories. The CLI maps these onto exit codes and tests
/// match on them instead of on message text.
enum class ErrorKind {
  kValidation,    // malformed input value (bad path, degenerate spec)
  kParse,         // malformed document; message carries the location
  kVersion,       // persisted format written by an incompatible schema
  kIntegrity,     // structurally valid document violating an invariant
  kConflict,      // two inputs disagree (e.g. suite registered twice)
  kUnknownSuite,  // reference to a suite the database does not know
  kLookup,        // unknown commit id or other missing key
  kRange,         // ids exist but are in the wrong order
  kState,         // operation not permitted in the current state
  kConsistency,   // bisection verdicts contradict each other
  kDegenerate,    // input with nothing to compute on
  kConfig,        // bad configuration value
  kIo,            // filesystem failure
  kTransientIo,   // retryable I/O failure (VCS adapter unavailable)
  kLex,           // tokenizer could not finish a literal or comment
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fastfail

#endif  // FASTFAIL_ERROR_HPP_
