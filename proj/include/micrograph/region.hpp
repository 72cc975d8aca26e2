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
#include <functional>
#include <vector>

#include "micrograph/html_model.hpp"

namespace micrograph {

// A contiguous document-order run of nodes: every node whose id lies in
// [first, last]. Because ids are preorder and Text nodes are leaves, such a
// run owns a well-defined set of Text characters. Characters before
// `window_start` are excluded (used to cut a step title off its content).
struct Region {
  NodeId first = 1;
  NodeId last = 0;
  std::size_t window_start = 0;

  bool empty() const { return first > last; }
  bool contains(NodeId id) const { return first <= id && id <= last; }
};

// Maximal subtrees lying entirely inside the id range, in document order.
std::vector<NodeId> top_level_nodes(const DomDocument& doc, NodeId first, NodeId last);
inline std::vector<NodeId> top_level_nodes(const DomDocument& doc, const Region& r) {
  return r.empty() ? std::vector<NodeId>{} : top_level_nodes(doc, r.first, r.last);
}

// Region spanning exactly the given top-level nodes.
Region region_of(const DomDocument& doc, const std::vector<NodeId>& top_level);

// Calls fn(text_node_id, clipped_span) for every Text node of the region
// with at least one character inside the window.
void for_each_text(const DomDocument& doc, const Region& r,
                   const std::function<void(NodeId, Span)>& fn);

std::size_t text_chars(const DomDocument& doc, const Region& r);

// Tight hull of the region's windowed text; empty span when there is none.
Span text_hull(const DomDocument& doc, const Region& r);

}  // namespace micrograph
