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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "micrograph/condition_extractor.hpp"
#include "micrograph/corpus_meta.hpp"
#include "micrograph/entity_linker.hpp"
#include "micrograph/html_model.hpp"
#include "micrograph/region.hpp"
#include "micrograph/section_segmenter.hpp"

namespace micrograph {

// Declaration order is the tie-break order used by stepset selection.
enum class StepGenerator {
  OrderedList,
  NumberedParagraphs,
  StepHeadings,
  NumberedTableRows,
  LeadNumberedListItems,
};
std::string_view to_string(StepGenerator g);

struct StepSet {
  StepGenerator generator = StepGenerator::OrderedList;
  std::vector<NodeId> anchors;  // one per step, increasing
  NodeId common_ancestor = 0;
  Span extent;           // first anchor start to the end of the last step
  NodeId extent_last = 0;  // last node id covered by the last step

  friend bool operator==(const StepSet&, const StepSet&) = default;
};

enum class StepType { Sequential, Conditional };
std::string_view to_string(StepType t);

enum class ContentKind { Paragraph, Code, Image, Table, Hyperlink, PlainList, Note };
std::string_view to_string(ContentKind k);

struct ContentBlock {
  ContentKind kind = ContentKind::Paragraph;
  std::string text;  // empty for images
  std::map<std::string, std::string> attrs;  // "source" for images, "target" for links
  Span span;
  NodeId node = 0;

  friend bool operator==(const ContentBlock&, const ContentBlock&) = default;
};

struct Procedure;

struct Step {
  int index = 0;  // 1-based
  std::string title;
  // Title text plus any stripped numbering token and terminator.
  Span title_span;
  StepType step_type = StepType::Sequential;
  std::vector<ContentBlock> content;
  std::vector<Procedure> nested;
  std::vector<ConditionalBlock> conditionals;  // spans in page_text
  Span span;
  NodeId anchor = 0;

  friend bool operator==(const Step&, const Step&);
};

struct Procedure {
  SectionType source_section = SectionType::Solution;
  int source_order = 0;
  StepGenerator generator = StepGenerator::OrderedList;
  std::vector<ContentBlock> preamble;
  std::vector<Step> steps;
  std::vector<ContentBlock> postamble;
  int depth = 0;
  Span span;

  friend bool operator==(const Procedure&, const Procedure&) = default;
};

struct ExtractionOptions {
  double coverage_threshold = 0.75;
  // Text before the first anchor is ignored by coverage() while it is at
  // most this fraction of the region's text.
  double preamble_ratio = 0.25;
  int max_depth = 8;
};

struct Diagnostic {
  std::string rule;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Everything procedure extraction reads besides the page. `linker` may be
// null, which disables constraint-entity step typing. `annotator` may be
// null, which disables conditional-block extraction.
struct ExtractionContext {
  const CorpusMeta& meta;
  const EntityLinker* linker = nullptr;
  const Annotator* annotator = nullptr;
  ExtractionOptions options;
  std::vector<Diagnostic>* diagnostics = nullptr;
};

// Steps as located by HTML navigation, before typing and recursion.
struct RawStep {
  std::string title;
  Span title_span;
  std::size_t title_text_start = 0;  // page offset of `title`
  Region content;  // step nodes with the title cut off by the window
  Span span;
  NodeId anchor = 0;
};

struct SectionContent {
  std::vector<Procedure> procedures;
  std::vector<ContentBlock> blocks;  // only when no procedure was found
};

// `1.`, `1)` or `(1)` followed by whitespace or end. Returns the number and
// sets `len` to the token length.
std::optional<int> parse_numbering(std::string_view text, std::size_t* len = nullptr);

std::vector<StepSet> find_step_sets(const Region& region, const DomDocument& doc,
                                    const CorpusMeta& meta);
std::vector<StepSet> find_step_sets(const Section& section, const DomDocument& doc,
                                    const CorpusMeta& meta);

double coverage(const StepSet& stepset, const Region& region, const DomDocument& doc,
                double preamble_ratio = 0.25);
double coverage(const StepSet& stepset, const Section& section, const DomDocument& doc,
                double preamble_ratio = 0.25);

std::optional<StepSet> select_parent_stepset(const std::vector<StepSet>& candidates,
                                             const Region& region, const DomDocument& doc,
                                             double threshold = 0.75,
                                             double preamble_ratio = 0.25);
std::optional<StepSet> select_parent_stepset(const std::vector<StepSet>& candidates,
                                             const Section& section, const DomDocument& doc,
                                             double threshold = 0.75,
                                             double preamble_ratio = 0.25);

// Throws NavigationError when an anchor lies outside the common ancestor.
std::vector<RawStep> extract_steps(const StepSet& stepset, const DomDocument& doc,
                                   const CorpusMeta& meta);

StepType classify_step_type(std::string_view title, std::string_view first_sentence,
                            const CorpusMeta& meta, const EntityLinker* linker);

// Throws UnknownNode.
ContentBlock classify_content(NodeId node, const DomDocument& doc);

// Content blocks covering every character of the region exactly once.
std::vector<ContentBlock> blockify(const Region& region, const DomDocument& doc);

// Procedures of a Solution, DiagnosticSteps or Answer section (any section
// when `force` is set). Empty when no stepset covers enough of the section.
std::vector<Procedure> extract_procedure(const Section& section, const DomDocument& doc,
                                         const ExtractionContext& ctx, int depth = 0,
                                         bool force = false);

bool is_procedural_section(SectionType t);

// Procedures for procedural sections, content blocks for everything else.
SectionContent extract_section_content(const Section& section, const DomDocument& doc,
                                       const ExtractionContext& ctx);

// Leading sentence of `text`: up to the first `.`, `:`, `!` or `?` that is
// followed by whitespace or the end. Returns {text length, consumed length
// including terminator and trailing spaces}.
std::pair<std::size_t, std::size_t> leading_sentence(std::string_view text);

}  // namespace micrograph
