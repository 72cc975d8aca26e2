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

#include "micrograph/entity_linker.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "micrograph/text.hpp"

namespace micrograph {

namespace {

bool boundary_before(std::string_view s, std::size_t i) {
  return i == 0 || !text::is_word_char(s[i - 1]);
}

bool boundary_after(std::string_view s, std::size_t i) {
  return i >= s.size() || !text::is_word_char(s[i]);
}

// Length of a version token `v?\d+(\.\d+)*` at s[i], or 0.
std::size_t version_token(std::string_view s, std::size_t i) {
  std::size_t j = i;
  if (j < s.size() && (s[j] == 'v' || s[j] == 'V')) ++j;
  auto digits = [&](std::size_t k) {
    std::size_t e = k;
    while (e < s.size() && std::isdigit(static_cast<unsigned char>(s[e]))) ++e;
    return e;
  };
  auto e = digits(j);
  if (e == j) return 0;
  while (e + 1 < s.size() && s[e] == '.' && std::isdigit(static_cast<unsigned char>(s[e + 1])))
    e = digits(e + 1);
  return boundary_after(s, e) ? e - i : 0;
}

bool is_edge_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) && c != '_';
}

}  // namespace

std::optional<std::string> lemmatize_action(std::string_view word,
                                            const std::unordered_set<std::string>& lexicon) {
  const auto w = text::to_lower(word);
  if (lexicon.count(w)) return w;
  auto strip = [&](std::string_view suffix) -> std::optional<std::string> {
    if (w.size() <= suffix.size() + 1 || w.compare(w.size() - suffix.size(), suffix.size(), suffix) != 0)
      return std::nullopt;
    return w.substr(0, w.size() - suffix.size());
  };
  std::vector<std::string> candidates;
  for (std::string_view suf : {"ing", "ed", "es", "s", "d"}) {
    auto base = strip(suf);
    if (!base) continue;
    candidates.push_back(*base);
    if (suf == "ing" || suf == "ed") {
      candidates.push_back(*base + "e");
      // Doubled final consonant: "stopped" -> "stop".
      if (base->size() >= 2 && (*base)[base->size() - 1] == (*base)[base->size() - 2])
        candidates.push_back(base->substr(0, base->size() - 1));
    }
  }
  if (auto base = strip("ies")) candidates.push_back(*base + "y");
  if (auto base = strip("ied")) candidates.push_back(*base + "y");
  for (const auto& c : candidates)
    if (lexicon.count(c)) return c;
  return std::nullopt;
}

EntityLinker::EntityLinker(const CorpusMeta& meta) : meta_(&meta) {
  std::map<std::string, std::size_t> owner;
  for (std::size_t e = 0; e < meta.entity_dictionary.size(); ++e) {
    for (const auto& sf : meta.entity_dictionary[e].surface_forms) {
      auto lower = text::to_lower(text::collapse_whitespace(sf));
      if (lower.empty()) continue;
      auto [it, inserted] = owner.emplace(lower, e);
      if (!inserted) {
        if (it->second != e) ambiguous_.push_back(sf);
        continue;
      }
      by_first_[lower[0]].push_back(Surface{lower, e});
    }
  }
  for (auto& [_, list] : by_first_)
    std::stable_sort(list.begin(), list.end(), [](const Surface& a, const Surface& b) {
      return a.lower.size() > b.lower.size();
    });
  for (const auto& a : meta.action_lexicon) actions_.insert(text::to_lower(a));
}

std::vector<Mention> EntityLinker::link(std::string_view s, std::size_t base,
                                        std::optional<NodeId> context) const {
  std::vector<Mention> out;
  std::vector<Span> taken;

  for (std::size_t i = 0; i < s.size();) {
    if (!boundary_before(s, i) || text::is_space(s[i])) {
      ++i;
      continue;
    }
    const char first = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    const Surface* hit = nullptr;
    if (auto it = by_first_.find(first); it != by_first_.end()) {
      for (const auto& cand : it->second) {
        const auto n = cand.lower.size();
        if (i + n <= s.size() && text::iequals(s.substr(i, n), cand.lower) &&
            boundary_after(s, i + n)) {
          hit = &cand;
          break;
        }
      }
    }
    if (!hit) {
      ++i;
      continue;
    }
    std::size_t end = i + hit->lower.size();
    // Absorb an adjacent version token: "db2 v11.5".
    std::size_t j = end;
    while (j < s.size() && s[j] == ' ') ++j;
    if (j > end && j < s.size()) {
      if (auto len = version_token(s, j)) end = j + len;
    }
    const auto& entry = meta_->entity_dictionary[hit->entry];
    Mention m;
    m.surface = std::string(s.substr(i, end - i));
    m.canonical = entry.canonical;
    m.mention_type = MentionType::Entity;
    m.entity_type = entry.entity_type;
    m.span = Span{base + i, base + end};
    m.context = context;
    taken.push_back(Span{i, end});
    out.push_back(std::move(m));
    i = end;
  }

  if (!actions_.empty()) {
    for (std::size_t i = 0; i < s.size();) {
      if (text::is_space(s[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < s.size() && !text::is_space(s[j])) ++j;
      std::size_t a = i, b = j;
      while (a < b && is_edge_punct(s[a])) ++a;
      while (b > a && is_edge_punct(s[b - 1])) --b;
      if (b > a) {
        Span local{a, b};
        bool overlaps = std::any_of(taken.begin(), taken.end(),
                                    [&](const Span& t) { return t.overlaps(local); });
        if (!overlaps) {
          if (auto lemma = lemmatize_action(s.substr(a, b - a), actions_)) {
            Mention m;
            m.surface = std::string(s.substr(a, b - a));
            m.canonical = *lemma;
            m.mention_type = MentionType::Action;
            m.span = Span{base + a, base + b};
            m.context = context;
            out.push_back(std::move(m));
          }
        }
      }
      i = j;
    }
  }

  std::sort(out.begin(), out.end(),
            [](const Mention& x, const Mention& y) { return x.span.start < y.span.start; });
  return out;
}

std::vector<Mention> link_mentions(std::string_view text, std::size_t base_offset,
                                   const CorpusMeta& meta) {
  return EntityLinker(meta).link(text, base_offset);
}

}  // namespace micrograph
