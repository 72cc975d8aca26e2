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
#include <vector>

#include "micrograph/corpus_meta.hpp"
#include "micrograph/html_model.hpp"
#include "micrograph/region.hpp"

namespace micrograph {

struct Section {
  SectionType section_type = SectionType::Other;
  std::string heading_text;           // "" for content before the first heading
  std::optional<NodeId> heading_node;  // absent for that leading content
  std::vector<NodeId> body_nodes;     // top-level nodes between this heading and the next
  Span heading_span;
  Span span;
  int order = 0;  // 1-based

  Region body(const DomDocument& doc) const { return region_of(doc, body_nodes); }
};

struct DocumentOutline {
  std::string title;
  std::optional<NodeId> title_node;
  // Set when the title node is not also a section heading; the document
  // itself then owns this text.
  std::optional<Span> title_span;
  std::string doc_type;
  std::vector<Section> sections;
  std::optional<std::string> source_url;
};

// Splits a page into typed sections. Throws NoContent for pages without text.
DocumentOutline segment(const DomDocument& doc, const CorpusMeta& meta);

// True for an h1-h6 or a bold-only paragraph whose text is a step cue
// ("Step 2: ..."). Such elements lead steps rather than sections.
bool is_step_heading(const DomDocument& doc, NodeId id, const CorpusMeta& meta);

// p/div whose text all sits inside b/strong and that holds no blocks.
bool is_bold_only(const DomDocument& doc, NodeId id);

}  // namespace micrograph
