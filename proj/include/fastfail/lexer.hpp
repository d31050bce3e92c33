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

#ifndef FASTFAIL_LEXER_HPP_
#define FASTFAIL_LEXER_HPP_

/// @file lexer.hpp
///
/// Language-agnostic C-family/script tokenizer. It knows `//`, `/* */` and
/// `#` comments, single/double quoted strings with backslash escapes and
/// triple-quoted strings. Every byte of input is either whitespace or part
/// of exactly one token, so the token texts plus the whitespace between
/// them reproduce the (UTF-8 sanitized) input.

#include <string>
#include <string_view>
#include <vector>

namespace fastfail {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kNumberLiteral,
  kStringLiteral,
  kPunct,
  kCommentLine,
  kCommentBlock,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::kPunct;
  std::string text;
  int line = 1;  // 1-based
  int col = 1;   // 1-based, in bytes

  bool is_comment() const {
    return kind == TokenKind::kCommentLine || kind == TokenKind::kCommentBlock;
  }
  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool operator==(const Token&) const = default;
};

struct TokenizedFile {
  std::string path;
  std::string text;  // input with invalid UTF-8 bytes replaced by U+FFFD
  std::vector<Token> tokens;
  std::vector<int> invalid_utf8_lines;
  int line_count = 0;
};

bool is_keyword(std::string_view word);

/// Throws kLex (with line) on unterminated strings and block comments.
TokenizedFile tokenize(std::string_view source, std::string path);

/// Replaces invalid UTF-8 sequences with U+FFFD; reports affected lines.
std::string sanitize_utf8(std::string_view input, std::vector<int>* bad_lines = nullptr);

}  // namespace fastfail

#endif  // FASTFAIL_LEXER_HPP_
