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
#include <vector>

#include <json.hpp>

#include "micrograph/corpus_meta.hpp"
#include "micrograph/entity_linker.hpp"
#include "micrograph/procedure_extractor.hpp"
#include "micrograph/section_segmenter.hpp"

namespace micrograph {

inline constexpr std::string_view kSchemaVersion = "1.0";

enum class GraphNodeKind {
  Document,
  Section,
  ContentBlock,
  Procedure,
  Step,
  ConditionalBlock,
  Entity,
  Action,
  Constraint,
};
std::string_view to_string(GraphNodeKind k);
std::optional<GraphNodeKind> graph_node_kind_from_string(std::string_view s);

enum class EdgeKind {
  HAS_SECTION,
  HAS_CONTENT,
  HAS_PROCEDURE,
  HAS_STEP,
  NEXT_STEP,
  HAS_NESTED,
  HAS_CONDITION,
  MENTIONS,
  CONSTRAINED_BY,
  LINKS_TO,
};
std::string_view to_string(EdgeKind k);
std::optional<EdgeKind> edge_kind_from_string(std::string_view s);
// Edges that make up the containment tree under the Document.
bool is_containment(EdgeKind k);

struct GraphNode {
  std::string id;
  GraphNodeKind kind = GraphNodeKind::Document;
  nlohmann::json props = nlohmann::json::object();
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string src;
  std::string dst;
  EdgeKind kind = EdgeKind::HAS_SECTION;
  std::optional<int> order;
  nlohmann::json props;  // null when absent
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Canonical edge order: (src, kind name, order with absent first, dst).
bool edge_less(const GraphEdge& a, const GraphEdge& b);

struct Micrograph {
  std::string schema_version{kSchemaVersion};
  std::string document;
  std::vector<GraphNode> nodes;  // sorted by id
  std::vector<GraphEdge> edges;  // sorted by edge_less
  const GraphNode* find(std::string_view id) const;
  friend bool operator==(const Micrograph&, const Micrograph&) = default;
};

// A stretch of page text owned by one node. Mentions attach to the unit
// that contains them.
struct TextUnit {
  Span span;
  std::string node_id;
  GraphNodeKind kind = GraphNodeKind::ContentBlock;
};

// `contents` runs parallel to outline.sections. Throws ConsistencyError when
// a mention lies outside every text unit, when `contents` does not match
// the sections, or when a procedure has no steps.
Micrograph build_micrograph(const DocumentOutline& outline,
                            const std::vector<SectionContent>& contents,
                            const std::vector<Mention>& mentions, const CorpusMeta& meta);

// Non-empty text units in page order, with the ids build_micrograph assigns.
std::vector<TextUnit> collect_text_units(const DocumentOutline& outline,
                                         const std::vector<SectionContent>& contents,
                                         const CorpusMeta& meta);

// `<prefix>:` plus the first 16 hex digits of SHA-256(material).
std::string make_node_id(std::string_view prefix, std::string_view material);
std::string entity_node_id(std::string_view canonical, std::string_view entity_type);
std::string action_node_id(std::string_view canonical);

nlohmann::json to_json(const Micrograph& g);
// Sorted keys, no insignificant whitespace, one trailing LF.
std::string serialize_canonical(const Micrograph& g);
// Throws SyntaxError for non-JSON and SchemaError for malformed graphs.
Micrograph parse_micrograph(std::string_view bytes);
Micrograph micrograph_from_json(const nlohmann::json& j);

struct Violation {
  std::string rule;
  std::string subject;  // node id or "src -KIND-> dst"
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks a serialized micrograph against the shipped JSON schema and the
// graph rules the schema cannot express. Throws SyntaxError for non-JSON.
std::vector<Violation> validate_schema(std::string_view bytes);
std::vector<Violation> validate_micrograph(const nlohmann::json& j);

// The JSON schema document the validator enforces.
std::string_view schema_document();

}  // namespace micrograph
