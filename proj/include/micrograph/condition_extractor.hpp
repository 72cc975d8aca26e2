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

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "micrograph/corpus_meta.hpp"
#include "micrograph/text.hpp"

namespace micrograph {

enum class Pos { VERB, NOUN, ADJ, ADV, ADP, SCONJ, DET, PRON, NUM, PUNCT, OTHER };
enum class Dep { Mark, Advcl, Root, Other };

std::string_view to_string(Pos p);
std::string_view to_string(Dep d);

struct AnnotatedToken {
  std::string text;
  std::string lemma;
  Pos pos = Pos::OTHER;
  Dep dep = Dep::Other;
  std::size_t head = 0;  // index within the sentence; root points at itself
  Span span;             // in the annotated text

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

struct Sentence {
  std::vector<AnnotatedToken> tokens;
  Span span;
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class RuleSource { DepRule, PatternRule };
std::string_view to_string(RuleSource s);

struct ConditionalBlock {
  std::string marker;  // lowercase lemma of the triggering subordinator
  std::string condition_text;
  std::string effect_text;
  Span condition_span;
  Span effect_span;
  RuleSource source = RuleSource::DepRule;

  friend bool operator==(const ConditionalBlock&, const ConditionalBlock&) = default;
};

// Anything that can produce sentences with PoS and dependency labels.
// extract_conditionals() only depends on this contract.
class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual std::vector<Sentence> annotate(std::string_view text) const = 0;
};

// Rule-based tagger: closed-class lexicons, suffix heuristics and an
// imperative-verb rule, with a flat mark/advcl/root dependency layer.
class BaselineAnnotator : public Annotator {
 public:
  explicit BaselineAnnotator(std::vector<std::string> condition_markers = {},
                             std::vector<std::string> extra_verbs = {});
  std::vector<Sentence> annotate(std::string_view text) const override;

 private:
  Pos tag(std::string_view lower) const;
  std::vector<std::string> multiword_markers_;
  std::unordered_set<std::string> markers_;
  std::unordered_set<std::string> verbs_;
};

// Serves annotations produced offline by an external parser, keyed by the
// SHA-256 of the annotated text. Unknown texts fall back to `fallback`.
class SidecarAnnotator : public Annotator {
 public:
  SidecarAnnotator(std::unordered_map<std::string, std::vector<Sentence>> entries,
                   std::shared_ptr<const Annotator> fallback);
  static SidecarAnnotator load(const std::string& path,
                               std::shared_ptr<const Annotator> fallback);

  std::vector<Sentence> annotate(std::string_view text) const override;
  std::size_t misses() const { return misses_.load(); }

 private:
  std::unordered_map<std::string, std::vector<Sentence>> entries_;
  std::shared_ptr<const Annotator> fallback_;
  mutable std::atomic<std::size_t> misses_{0};
};

nlohmann::json sentence_to_json(const Sentence& s);
Sentence sentence_from_json(const nlohmann::json& j);  // throws SchemaError
// One sidecar line: {"text_sha256": ..., "sentences": [...]}.
std::string sidecar_line(std::string_view text, const std::vector<Sentence>& sentences);

// Baseline annotation with the default marker list.
std::vector<Sentence> annotate(std::string_view text);

std::vector<ConditionalBlock> extract_conditionals(std::string_view text,
                                                   const std::vector<Sentence>& sentences,
                                                   const CorpusMeta& meta);

}  // namespace micrograph
