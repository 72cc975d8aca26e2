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

#include "micrograph/region.hpp"

#include <algorithm>

namespace micrograph {

std::vector<NodeId> top_level_nodes(const DomDocument& doc, NodeId first, NodeId last) {
  std::vector<NodeId> out;
  if (doc.nodes.empty()) return out;
  last = std::min(last, doc.nodes.size() - 1);
  NodeId id = first;
  while (id <= last) {
    const auto* n = &doc.nodes[id];
    if (n->last > last) {
      ++id;  // partially covered ancestor: descend
      continue;
    }
    while (n->parent && *n->parent >= first && doc.nodes[*n->parent].last <= last)
      n = &doc.nodes[*n->parent];
    out.push_back(n->id);
    id = n->last + 1;
  }
  return out;
}

Region region_of(const DomDocument& doc, const std::vector<NodeId>& top_level) {
  if (top_level.empty()) return Region{};
  return Region{top_level.front(), doc.nodes[top_level.back()].last, 0};
}

void for_each_text(const DomDocument& doc, const Region& r,
                   const std::function<void(NodeId, Span)>& fn) {
  if (r.empty()) return;
  const auto last = std::min(r.last, doc.nodes.size() - 1);
  for (NodeId id = r.first; id <= last; ++id) {
    const auto& n = doc.nodes[id];
    if (!n.is_text() || n.span.end <= r.window_start) continue;
    fn(id, Span{std::max(n.span.start, r.window_start), n.span.end});
  }
}

std::size_t text_chars(const DomDocument& doc, const Region& r) {
  std::size_t total = 0;
  for_each_text(doc, r, [&](NodeId, Span s) { total += s.size(); });
  return total;
}

Span text_hull(const DomDocument& doc, const Region& r) {
  bool any = false;
  Span hull;
  for_each_text(doc, r, [&](NodeId, Span s) {
    if (!any) hull = s;
    hull.end = s.end;
    any = true;
  });
  return hull;
}

}  // namespace micrograph
