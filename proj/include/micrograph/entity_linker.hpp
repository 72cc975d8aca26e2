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

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "micrograph/corpus_meta.hpp"
#include "micrograph/html_model.hpp"

namespace micrograph {

enum class MentionType { Entity, Action };

struct Mention {
  std::string surface;    // exact page text
  std::string canonical;  // dictionary canonical or action lemma
  MentionType mention_type = MentionType::Entity;
  std::string entity_type;  // empty for actions
  Span span;                // in page_text
  std::optional<NodeId> context;

  friend bool operator==(const Mention&, const Mention&) = default;
};

// Gazetteer over a corpus dictionary: longest match, left to right,
// case-insensitive, anchored on word boundaries. Read-only after
// construction and safe to share.
class EntityLinker {
 public:
  explicit EntityLinker(const CorpusMeta& meta);

  std::vector<Mention> link(std::string_view text, std::size_t base_offset,
                            std::optional<NodeId> context = std::nullopt) const;

  // Surface forms claimed by more than one canonical; the first entry wins.
  const std::vector<std::string>& ambiguous_surfaces() const { return ambiguous_; }
  const CorpusMeta& meta() const { return *meta_; }

 private:
  struct Surface {
    std::string lower;
    std::size_t entry;
  };
  const CorpusMeta* meta_;
  // Keyed by the first byte of the lowercased surface; longest first.
  std::unordered_map<char, std::vector<Surface>> by_first_;
  std::unordered_set<std::string> actions_;
  std::vector<std::string> ambiguous_;
};

std::vector<Mention> link_mentions(std::string_view text, std::size_t base_offset,
                                   const CorpusMeta& meta);

// Maps an inflected verb ("restarted", "stops") onto a lexicon lemma.
std::optional<std::string> lemmatize_action(std::string_view word,
                                            const std::unordered_set<std::string>& lexicon);

}  // namespace micrograph
