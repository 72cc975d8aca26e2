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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "micrograph/text.hpp"

namespace micrograph {

using NodeId = std::size_t;

enum class NodeKind { Element, Text };

// One node of the normalized tree. Ids are preorder indices; `last` is the
// id of the last node in this node's subtree, so a subtree is exactly the id
// range [id, last].
struct DomNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Element;
  std::string tag;  // lowercase, Element only
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // Text only; equals page_text sliced by span
  std::vector<NodeId> children;
  std::optional<NodeId> parent;
  Span span;
  NodeId last = 0;
  std::size_t depth = 0;

  bool is_element() const { return kind == NodeKind::Element; }
  bool is_text() const { return kind == NodeKind::Text; }
  bool is(std::string_view t) const { return kind == NodeKind::Element && tag == t; }
  std::optional<std::string_view> attr(std::string_view name) const;
};

// Parsed page. Immutable after parse_html(); shareable across threads.
//
// page_text is the concatenation of all Text node texts in document order,
// with a single space inserted wherever whitespace or a block boundary
// separated two of them. Separator spaces belong to no Text node.
struct DomDocument {
  std::vector<DomNode> nodes;
  NodeId root = 0;
  std::string page_text;
  std::optional<std::string> source_url;
  // Text of the first <title> element. Head metadata is kept out of page_text.
  std::optional<std::string> head_title;
  // Byte offset where invalid UTF-8 truncated the input, if it did.
  std::optional<std::size_t> truncated_at;

  const DomNode& node(NodeId id) const;  // throws UnknownNode
  bool contains(NodeId id) const { return id < nodes.size(); }
  bool is_ancestor(NodeId ancestor, NodeId descendant) const {
    return ancestor < descendant && descendant <= nodes[ancestor].last;
  }
  std::string_view slice(const Span& s) const {
    return std::string_view(page_text).substr(s.start, s.size());
  }
};

// Throws EmptyDocument for empty input and EncodingError when the input has
// no valid UTF-8 prefix. Input past the first invalid byte is dropped.
DomDocument parse_html(std::string_view bytes);

// Whitespace-normalized subtree text. Throws UnknownNode.
std::string text_of(const DomDocument& doc, NodeId id);

bool is_block_tag(std::string_view tag);
bool is_heading_tag(std::string_view tag);

}  // namespace micrograph
