// Copyright 2026 The AASP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Whitespace tokenization with punctuation detachment over code-point offsets
// (annotation offsets in both supported corpora count characters, not bytes).

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace aasp {

// UTF-8 text indexed by code point.
class CodePointText {
 public:
  explicit CodePointText(std::string text) : text_(std::move(text)) {
    size_t i = 0;
    while (i < text_.size()) {
      offsets_.push_back(i);
      const unsigned char c = text_[i];
      size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
      uint32_t cp = len == 1 ? c : c & (0x7F >> len);
      for (size_t k = 1; k < len && i + k < text_.size(); ++k) {
        cp = (cp << 6) | (static_cast<unsigned char>(text_[i + k]) & 0x3F);
      }
      code_points_.push_back(cp);
      i += len;
    }
    offsets_.push_back(text_.size());
  }

  int size() const { return static_cast<int>(code_points_.size()); }
  uint32_t at(int i) const { return code_points_[i]; }
  std::string Substr(int begin, int end) const {
    return text_.substr(offsets_[begin], offsets_[end] - offsets_[begin]);
  }
  const std::string &text() const { return text_; }

 private:
  std::string text_;
  std::vector<size_t> offsets_;
  std::vector<uint32_t> code_points_;
};

struct Token {
  std::string text;
  int begin = 0;  // code points, half-open
  int end = 0;
};

inline bool IsSpace(uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0 || cp == 0x2009 || cp == 0x200B || cp == 0x3000 ||
         cp == 0xFEFF;
}

inline bool IsAsciiAlnum(uint32_t cp) {
  return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

inline bool IsPunct(uint32_t cp) {
  if (cp < 0x80) return cp > ' ' && cp != 0x7F && !IsAsciiAlnum(cp);
  return (cp >= 0x2010 && cp <= 0x2027) || cp == 0xAB || cp == 0xBB || cp == 0xBF ||
         cp == 0xA1;
}

struct TokenizeResult {
  std::vector<Token> tokens;
  int forced_splits = 0;
};

// Tokenizes code points [begin, end). Apostrophes, hyphens and periods between
// alphanumerics stay inside the word ("don't", "long-term", "3.5"); other
// punctuation becomes its own token. Every position in `boundaries` is
// guaranteed to fall on a token edge, splitting tokens where needed.
inline TokenizeResult Tokenize(const CodePointText &text, int begin, int end,
                               const std::set<int> &boundaries = {}) {
  TokenizeResult out;
  auto emit = [&](int b, int e) {
    if (b >= e) return;
    int start = b;
    for (auto it = boundaries.upper_bound(b); it != boundaries.end() && *it < e; ++it) {
      out.tokens.push_back({text.Substr(start, *it), start, *it});
      start = *it;
      ++out.forced_splits;
    }
    out.tokens.push_back({text.Substr(start, e), start, e});
  };
  int word_start = -1;
  for (int i = begin; i < end; ++i) {
    const uint32_t cp = text.at(i);
    const bool joiner = (cp == '\'' || cp == '-' || cp == '.' || cp == 0x2019) &&
                        word_start >= 0 && i + 1 < end && IsAsciiAlnum(text.at(i + 1)) &&
                        IsAsciiAlnum(text.at(i - 1));
    if (IsSpace(cp) || (IsPunct(cp) && !joiner)) {
      if (word_start >= 0) emit(word_start, i);
      word_start = -1;
      if (!IsSpace(cp)) emit(i, i + 1);
    } else if (word_start < 0) {
      word_start = i;
    }
  }
  if (word_start >= 0) emit(word_start, end);
  return out;
}

}  // namespace aasp
