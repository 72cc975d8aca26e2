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

#include "micrograph/section_segmenter.hpp"

#include <algorithm>
#include <set>

#include "micrograph/error.hpp"

namespace micrograph {

namespace {

bool has_bold_ancestor(const DomDocument& doc, NodeId id, NodeId stop) {
  auto p = doc.nodes[id].parent;
  while (p && *p != stop) {
    const auto& n = doc.nodes[*p];
    if (n.is("b") || n.is("strong")) return true;
    p = n.parent;
  }
  return false;
}

}  // namespace

bool is_bold_only(const DomDocument& doc, NodeId id) {
  const auto& n = doc.node(id);
  if (!(n.is("p") || n.is("div")) || n.span.empty()) return false;
  for (NodeId k = id + 1; k <= n.last; ++k) {
    const auto& d = doc.nodes[k];
    if (d.is_element() && is_block_tag(d.tag) && d.tag != "br") return false;
    if (d.is_text() && !has_bold_ancestor(doc, k, id)) return false;
  }
  return true;
}

bool is_step_heading(const DomDocument& doc, NodeId id, const CorpusMeta& meta) {
  const auto& n = doc.node(id);
  if (!(n.is_element() && (is_heading_tag(n.tag) || is_bold_only(doc, id)))) return false;
  return match_step_cue(doc.slice(n.span), meta).has_value();
}

DocumentOutline segment(const DomDocument& doc, const CorpusMeta& meta) {
  if (text::trim(doc.page_text).empty()) throw NoContent("page has no text content");

  DocumentOutline outline;
  outline.source_url = doc.source_url;

  std::optional<NodeId> title_h1;
  for (const auto& n : doc.nodes) {
    if (n.is("h1") && !n.span.empty()) {
      title_h1 = n.id;
      break;
    }
  }

  // Candidate headings in document order, never nested in one another.
  std::vector<NodeId> headings;
  for (NodeId id = 0; id < doc.nodes.size();) {
    const auto& n = doc.nodes[id];
    if (title_h1 && id == *title_h1) {
      id = n.last + 1;
      continue;
    }
    bool candidate = false;
    if (n.is_element() && !n.span.empty()) {
      if (is_heading_tag(n.tag)) {
        candidate = !is_step_heading(doc, id, meta);
      } else if (is_bold_only(doc, id)) {
        candidate = match_heading_rule(doc.slice(n.span), meta).has_value() &&
                    !is_step_heading(doc, id, meta);
      }
    }
    if (candidate) {
      headings.push_back(id);
      id = n.last + 1;
    } else {
      ++id;
    }
  }

  if (title_h1) {
    outline.title = text_of(doc, *title_h1);
    outline.title_node = title_h1;
    outline.title_span = doc.nodes[*title_h1].span;
  } else if (doc.head_title) {
    outline.title = *doc.head_title;
  } else if (!headings.empty()) {
    outline.title = text_of(doc, headings.front());
    outline.title_node = headings.front();
  }

  std::vector<NodeId> boundaries = headings;
  if (title_h1) boundaries.push_back(*title_h1);
  std::sort(boundaries.begin(), boundaries.end());

  const NodeId end_id = doc.nodes.size();
  auto add_gap = [&](NodeId first, NodeId last) {
    if (first > last) return;
    Region r{first, last, 0};
    if (text_chars(doc, r) == 0) return;
    Section s;
    s.section_type = SectionType::Other;
    s.body_nodes = top_level_nodes(doc, r);
    s.span = text_hull(doc, r);
    s.heading_span = Span{s.span.start, s.span.start};
    outline.sections.push_back(std::move(s));
  };

  NodeId cursor = 0;
  for (std::size_t k = 0; k < boundaries.size(); ++k) {
    const auto b = boundaries[k];
    if (cursor < b) add_gap(cursor, b - 1);
    const auto& bn = doc.nodes[b];
    if (title_h1 && b == *title_h1) {
      cursor = bn.last + 1;
      continue;
    }
    const NodeId next = k + 1 < boundaries.size() ? boundaries[k + 1] : end_id;
    Section s;
    s.heading_node = b;
    s.heading_text = text_of(doc, b);
    s.heading_span = bn.span;
    s.section_type = resolve_section_type(s.heading_text, meta);
    Region body{bn.last + 1, next - 1, 0};
    if (!body.empty()) s.body_nodes = top_level_nodes(doc, body);
    auto hull = text_hull(doc, body);
    s.span = Span{bn.span.start, hull.empty() ? bn.span.end : std::max(bn.span.end, hull.end)};
    outline.sections.push_back(std::move(s));
    cursor = next;
  }
  if (cursor < end_id) add_gap(cursor, end_id - 1);

  std::set<SectionType> present;
  for (std::size_t i = 0; i < outline.sections.size(); ++i) {
    outline.sections[i].order = static_cast<int>(i) + 1;
    present.insert(outline.sections[i].section_type);
  }
  outline.doc_type = resolve_doc_type(outline.title, present, meta);
  return outline;
}

}  // namespace micrograph
