// Copyright 2026 The Micrograph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace micrograph {

// Half-open byte range [start, end) into a document's normalized page text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > start ? end - start : 0; }
  bool empty() const { return end <= start; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

inline Span intersect(const Span& a, const Span& b) {
  Span s{a.start > b.start ? a.start : b.start, a.end < b.end ? a.end : b.end};
  if (s.end < s.start) s.end = s.start;
  return s;
}

namespace text {

bool is_space(char c);
// ASCII word characters plus any UTF-8 lead/continuation byte.
bool is_word_char(char c);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
// Collapse whitespace runs to one space and trim both ends.
std::string collapse_whitespace(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

// Length of the longest valid UTF-8 prefix of `s`.
std::size_t valid_utf8_prefix(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
// Largest index <= pos that does not fall inside a multibyte sequence.
std::size_t utf8_floor(std::string_view s, std::size_t pos);

// Full lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace text
}  // namespace micrograph
