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

#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace micrograph {

enum class SectionType {
  Title,
  Question,
  Answer,
  Problem,
  Symptom,
  Cause,
  DiagnosticSteps,
  Solution,
  Constraints,
  RelatedInformation,
  References,
  Other,
};

std::string_view to_string(SectionType t);
std::optional<SectionType> section_type_from_string(std::string_view s);

// A case-insensitive ECMAScript regular expression that keeps its source
// text. Two patterns compare equal when their sources do.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::string source);  // throws std::regex_error

  const std::string& source() const { return source_; }
  bool full_match(std::string_view text) const;
  bool search(std::string_view text) const;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.source_ == b.source_;
  }

 private:
  std::string source_;
  std::shared_ptr<const std::regex> re_;
};

struct DocTypeSpec {
  std::string name;
  std::vector<SectionType> required_sections;
  std::vector<Pattern> title_patterns;
  friend bool operator==(const DocTypeSpec&, const DocTypeSpec&) = default;
};

struct HeadingRule {
  Pattern pattern;
  SectionType section_type = SectionType::Other;
  friend bool operator==(const HeadingRule&, const HeadingRule&) = default;
};

struct DictionaryEntry {
  std::string canonical;
  std::vector<std::string> surface_forms;
  std::string entity_type;
  friend bool operator==(const DictionaryEntry&, const DictionaryEntry&) = default;
};

// Per-corpus meta-information. Immutable after load_meta(); safe to share
// between concurrent document pipelines.
struct CorpusMeta {
  std::string corpus_id;
  std::vector<DocTypeSpec> doc_types;
  std::vector<HeadingRule> section_heading_map;  // first match wins
  std::vector<std::string> constraint_entity_types;
  std::vector<DictionaryEntry> entity_dictionary;
  std::vector<std::string> action_lexicon;
  std::vector<std::string> step_cue_lexicon;
  std::vector<std::string> condition_markers;
  bool entity_linking_enabled = true;
  // Reserved slot for an embedding table; the rule-based pipeline never reads it.
  std::optional<std::string> embedding_table;

  bool is_constraint_type(std::string_view entity_type) const;

  friend bool operator==(const CorpusMeta&, const CorpusMeta&) = default;
};

// Throws SyntaxError, SchemaError (naming the field path) or DuplicateError.
CorpusMeta load_meta(std::string_view bytes);
CorpusMeta load_meta_file(const std::string& path);
nlohmann::json meta_to_json(const CorpusMeta& meta);

// Lowercase, collapse whitespace and drop trailing colons.
std::string normalize_heading(std::string_view heading);

// Matches a leading "Step <n>" or "<cue> <n>" (cue from step_cue_lexicon).
// Returns the step number and sets `token_len` to the bytes consumed
// through the number.
std::optional<int> match_step_cue(std::string_view text, const CorpusMeta& meta,
                                  std::size_t* token_len = nullptr);

// Index of the first heading rule whose pattern matches, if any.
std::optional<std::size_t> match_heading_rule(std::string_view heading,
                                              const CorpusMeta& meta);
SectionType resolve_section_type(std::string_view heading, const CorpusMeta& meta);

// First doc type whose title pattern matches, else the first whose required
// sections are all present, else "unknown".
std::string resolve_doc_type(std::string_view title,
                             const std::set<SectionType>& section_types_present,
                             const CorpusMeta& meta);

}  // namespace micrograph
