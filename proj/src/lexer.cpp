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

#include "fastfail/lexer.hpp"

#include <array>
#include <set>

#include "fastfail/error.hpp"

namespace fastfail {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier: return "identifier";
    case TokenKind::kKeyword: return "keyword";
    case TokenKind::kNumberLiteral: return "number";
    case TokenKind::kStringLiteral: return "string";
    case TokenKind::kPunct: return "punct";
    case TokenKind::kCommentLine: return "comment-line";
    case TokenKind::kCommentBlock: return "comment-block";
  }
  return "punct";
}

bool is_keyword(std::string_view word) {
  static const std::set<std::string_view> kKeywords = {
      "abstract", "and",      "as",        "assert",   "async",     "auto",
      "await",    "bool",     "boolean",   "break",    "byte",      "case",
      "catch",    "char",     "class",     "const",    "continue",  "def",
      "default",  "defer",    "del",       "delete",   "do",        "double",
      "elif",     "else",     "enum",      "except",   "extends",   "extern",
      "false",    "final",    "finally",   "float",    "fn",        "for",
      "func",     "function", "global",    "goto",     "if",        "impl",
      "implements", "import", "in",        "inline",   "instanceof", "int",
      "interface", "is",      "lambda",    "let",      "long",      "namespace",
      "new",      "nonlocal", "not",       "null",     "nullptr",   "operator",
      "or",       "override", "package",   "pass",     "private",   "protected",
      "pub",      "public",   "raise",     "register", "return",    "short",
      "signed",   "sizeof",   "static",    "struct",   "super",     "switch",
      "template", "this",     "throw",     "throws",   "trait",     "true",
      "try",      "typedef",  "typename",  "union",    "unsigned",  "using",
      "var",      "virtual",  "void",      "volatile", "while",     "with",
      "yield",    "None",     "True",      "False",
  };
  return kKeywords.count(word) > 0;
}

std::string sanitize_utf8(std::string_view in, std::vector<int>* bad_lines) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  int line = 1;
  std::size_t i = 0;
  while (i < in.size()) {
    const auto c = static_cast<unsigned char>(in[i]);
    if (c < 0x80) {
      if (c == '\n') ++line;
      out += static_cast<char>(c);
      ++i;
      continue;
    }
    std::size_t len = 0;
    unsigned cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(in[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range code points.
    if (ok) {
      static constexpr std::array<unsigned, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
      ok = cp >= kMin[len] && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out += kReplacement;
      if (bad_lines != nullptr && (bad_lines->empty() || bad_lines->back() != line)) {
        bad_lines->push_back(line);
      }
      ++i;
    }
  }
  return out;
}

namespace {

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr std::array<std::string_view, 5> kPunct3 = {"...", "<<=", ">>=", "===", "!=="};
constexpr std::array<std::string_view, 21> kPunct2 = {
    "&&", "||", "==", "!=", "<=", ">=", "->", "::", "++", "--", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "=>"};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < s_.size()) {
      const auto c = static_cast<unsigned char>(s_[pos_]);
      if (is_space(c)) {
        advance(1);
        continue;
      }
      const int line = line_, col = col_;
      const std::size_t start = pos_;
      TokenKind kind;
      if (starts_with("//") || c == '#') {
        kind = TokenKind::kCommentLine;
        while (pos_ < s_.size() && s_[pos_] != '\n') advance(1);
      } else if (starts_with("/*")) {
        kind = TokenKind::kCommentBlock;
        const auto end = s_.find("*/", pos_ + 2);
        if (end == std::string_view::npos) {
          throw Error(ErrorKind::kLex,
                      "unterminated block comment starting at line " + std::to_string(line));
        }
        advance(end + 2 - pos_);
      } else if (c == '"' || c == '\'') {
        kind = TokenKind::kStringLiteral;
        lex_string(static_cast<char>(c), line);
      } else if (is_digit(c) || (c == '.' && pos_ + 1 < s_.size() &&
                                 is_digit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        kind = TokenKind::kNumberLiteral;
        lex_number();
      } else if (is_ident_start(c)) {
        while (pos_ < s_.size() && is_ident_char(static_cast<unsigned char>(s_[pos_]))) advance(1);
        kind = is_keyword(s_.substr(start, pos_ - start)) ? TokenKind::kKeyword
                                                          : TokenKind::kIdentifier;
      } else {
        kind = TokenKind::kPunct;
        advance(punct_length());
      }
      out.push_back(Token{kind, std::string(s_.substr(start, pos_ - start)), line, col});
    }
    return out;
  }

  int lines() const { return line_; }

 private:
  bool starts_with(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && pos_ < s_.size(); ++k, ++pos_) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void lex_string(char quote, int line) {
    const std::string triple(3, quote);
    if (starts_with(triple)) {
      const auto end = s_.find(triple, pos_ + 3);
      if (end == std::string_view::npos) {
        throw Error(ErrorKind::kLex, "unterminated string starting at line " + std::to_string(line));
      }
      advance(end + 3 - pos_);
      return;
    }
    advance(1);
    while (true) {
      if (pos_ >= s_.size() || s_[pos_] == '\n') {
        throw Error(ErrorKind::kLex, "unterminated string starting at line " + std::to_string(line));
      }
      const char c = s_[pos_];
      if (c == '\\') {
        advance(pos_ + 1 < s_.size() ? 2 : 1);
        continue;
      }
      advance(1);
      if (c == quote) return;
    }
  }

  void lex_number() {
    while (pos_ < s_.size()) {
      const auto c = static_cast<unsigned char>(s_[pos_]);
      const auto prev = static_cast<unsigned char>(s_[pos_ - 1]);
      if (is_ident_char(c) && c < 0x80) {
        advance(1);
      } else if (c == '.' && pos_ + 1 < s_.size() &&
                 is_digit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        advance(1);
      } else if ((c == '+' || c == '-') && (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') &&
                 pos_ + 1 < s_.size() && is_digit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        advance(1);
      } else if (c == '\'' && is_digit(prev) && pos_ + 1 < s_.size() &&
                 is_digit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        advance(1);  // digit separator
      } else {
        break;
      }
    }
  }

  std::size_t punct_length() const {
    for (auto p : kPunct3) {
      if (starts_with(p)) return 3;
    }
    for (auto p : kPunct2) {
      if (starts_with(p)) return 2;
    }
    return 1;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

TokenizedFile tokenize(std::string_view source, std::string path) {
  TokenizedFile file;
  file.path = std::move(path);
  file.text = sanitize_utf8(source, &file.invalid_utf8_lines);
  Lexer lexer(file.text);
  try {
    file.tokens = lexer.run();
  } catch (const Error& e) {
    throw Error(e.kind(), file.path + ": " + e.what());
  }
  file.line_count = file.text.empty() ? 0 : lexer.lines() - (file.text.back() == '\n' ? 1 : 0);
  return file;
}

}  // namespace fastfail
