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

#include "micrograph/micrograph_builder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "micrograph/error.hpp"

namespace micrograph {
namespace {

using nlohmann::json;

constexpr std::string_view kNodeKinds[] = {
    "Document", "Section", "ContentBlock", "Procedure", "Step",
    "ConditionalBlock", "Entity", "Action", "Constraint"};
constexpr std::string_view kEdgeKinds[] = {
    "HAS_SECTION", "HAS_CONTENT", "HAS_PROCEDURE", "HAS_STEP", "NEXT_STEP",
    "HAS_NESTED", "HAS_CONDITION", "MENTIONS", "CONSTRAINED_BY", "LINKS_TO"};

json span_json(const Span& s) { return json::array({s.start, s.end}); }

struct Unit {
  TextUnit unit;
  SectionType section = SectionType::Other;
};

class Builder {
 public:
  Builder(const DocumentOutline& outline, const CorpusMeta& meta)
      : outline_(outline), meta_(meta), url_(outline.source_url.value_or("")) {}

  void build(const std::vector<SectionContent>& contents) {
    if (contents.size() != outline_.sections.size())
      throw ConsistencyError("got content for " + std::to_string(contents.size()) +
                             " sections, outline has " +
                             std::to_string(outline_.sections.size()));
    json props = {{"url", url_},
                  {"title", outline_.title},
                  {"doc_type", outline_.doc_type},
                  {"corpus_id", meta_.corpus_id}};
    if (outline_.title_span) props["title_span"] = span_json(*outline_.title_span);
    doc_id_ = make_node_id("doc", url_);
    nodes_.push_back({doc_id_, GraphNodeKind::Document, props});
    if (outline_.title_span) unit(*outline_.title_span, doc_id_, GraphNodeKind::Document);

    for (std::size_t i = 0; i < outline_.sections.size(); ++i) {
      const auto& s = outline_.sections[i];
      section_ = s.section_type;
      const auto path = "/s" + std::to_string(s.order);
      const auto id = add(GraphNodeKind::Section, "sec", path, s.span,
                          {{"section_type", to_string(s.section_type)},
                           {"heading", s.heading_text},
                           {"order", s.order},
                           {"span", span_json(s.span)}});
      edge(doc_id_, id, EdgeKind::HAS_SECTION, s.order);
      if (s.heading_node) unit(s.heading_span, id, GraphNodeKind::Section);

      const auto& c = contents[i];
      int order = 0;
      for (const auto& b : c.blocks) {
        ++order;
        block(id, path + "/b" + std::to_string(order), b, order);
      }
      order = 0;
      for (const auto& p : c.procedures) {
        ++order;
        const auto pid = procedure(path + "/p" + std::to_string(order), p);
        edge(id, pid, EdgeKind::HAS_PROCEDURE, order);
      }
    }
  }

  void attach(const std::vector<Mention>& mentions) {
    auto units = units_;
    std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
      return a.unit.span.start < b.unit.span.start;
    });
    std::vector<const Mention*> sorted;
    for (const auto& m : mentions) sorted.push_back(&m);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Mention* a, const Mention* b) {
      return std::tie(a->span.start, a->span.end) < std::tie(b->span.start, b->span.end);
    });

    std::map<std::string, int> per_source;
    std::set<std::string> known;
    for (const auto* m : sorted) {
      auto it = std::upper_bound(units.begin(), units.end(), m->span.start,
                                 [](std::size_t pos, const Unit& u) {
                                   return pos < u.unit.span.start;
                                 });
      if (it == units.begin() || !std::prev(it)->unit.span.contains(m->span) || m->span.empty())
        throw ConsistencyError("mention '" + m->surface + "' at [" +
                               std::to_string(m->span.start) + "," +
                               std::to_string(m->span.end) + ") lies outside every node");
      const auto& owner = *std::prev(it);

      std::string target;
      if (m->mention_type == MentionType::Entity) {
        target = entity_node_id(m->canonical, m->entity_type);
        if (known.insert(target).second)
          nodes_.push_back({target, GraphNodeKind::Entity,
                            {{"canonical", m->canonical}, {"entity_type", m->entity_type}}});
      } else {
        target = action_node_id(m->canonical);
        if (known.insert(target).second)
          nodes_.push_back({target, GraphNodeKind::Action, {{"canonical", m->canonical}}});
      }
      edge(owner.unit.node_id, target, EdgeKind::MENTIONS, ++per_source[owner.unit.node_id],
           {{"span", span_json(m->span)}, {"surface", m->surface}});

      if (m->mention_type == MentionType::Entity && owner.section == SectionType::Constraints &&
          meta_.is_constraint_type(m->entity_type)) {
        const auto cid =
            make_node_id("con", url_ + "\x1f" + m->entity_type + "\x1f" + m->canonical);
        if (known.insert(cid).second) {
          nodes_.push_back({cid, GraphNodeKind::Constraint,
                            {{"constraint_type", m->entity_type}, {"value", m->canonical}}});
          edge(doc_id_, cid, EdgeKind::CONSTRAINED_BY, std::nullopt);
        }
      }
    }
  }

  Micrograph finish() {
    Micrograph g;
    g.document = doc_id_;
    g.nodes = std::move(nodes_);
    g.edges = std::move(edges_);
    std::sort(g.nodes.begin(), g.nodes.end(),
              [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
      if (g.nodes[i].id == g.nodes[i - 1].id)
        throw ConsistencyError("node id collision: " + g.nodes[i].id);
    }
    std::sort(g.edges.begin(), g.edges.end(), edge_less);
    return g;
  }

  std::vector<TextUnit> units() const {
    std::vector<TextUnit> out;
    for (const auto& u : units_) out.push_back(u.unit);
    std::sort(out.begin(), out.end(), [](const TextUnit& a, const TextUnit& b) {
      return a.span.start < b.span.start;
    });
    return out;
  }

 private:
  std::string add(GraphNodeKind kind, std::string_view prefix, const std::string& path,
                  const Span& span, json props) {
    auto id = make_node_id(prefix, url_ + "\x1f" + path + "\x1f" + std::to_string(span.start) +
                                       "-" + std::to_string(span.end));
    nodes_.push_back({id, kind, std::move(props)});
    return id;
  }

  void edge(const std::string& src, const std::string& dst, EdgeKind kind,
            std::optional<int> order, json props = nullptr) {
    edges_.push_back({src, dst, kind, order, std::move(props)});
  }

  void unit(const Span& span, const std::string& id, GraphNodeKind kind) {
    if (!span.empty()) units_.push_back({{span, id, kind}, section_});
  }

  void block(const std::string& parent, const std::string& path, const ContentBlock& b,
             int order, const char* role = nullptr) {
    json props = {{"content_kind", to_string(b.kind)},
                  {"text", b.text},
                  {"span", span_json(b.span)}};
    if (b.kind == ContentKind::Hyperlink) props["links_to"] = b.attrs.count("target") ? b.attrs.at("target") : "";
    for (const auto& [k, v] : b.attrs) {
      if (k != "target") props[k] = v;
    }
    const auto id = add(GraphNodeKind::ContentBlock, "blk", path, b.span, std::move(props));
    edge(parent, id, EdgeKind::HAS_CONTENT, order,
         role ? json{{"role", role}} : json(nullptr));
    unit(b.span, id, GraphNodeKind::ContentBlock);
  }

  std::string procedure(const std::string& path, const Procedure& p) {
    if (p.steps.empty()) throw ConsistencyError("procedure at " + path + " has no steps");
    const auto id = add(GraphNodeKind::Procedure, "proc", path, p.span,
                        {{"depth", p.depth},
                         {"source_section", to_string(p.source_section)},
                         {"source_order", p.source_order},
                         {"generator", to_string(p.generator)},
                         {"span", span_json(p.span)}});
    int order = 0;
    for (const auto& b : p.preamble) {
      ++order;
      block(id, path + "/b" + std::to_string(order), b, order, "preamble");
    }
    std::string prev;
    for (const auto& s : p.steps) {
      const auto sid = step(path + "/st" + std::to_string(s.index), s);
      edge(id, sid, EdgeKind::HAS_STEP, s.index);
      if (!prev.empty()) edge(prev, sid, EdgeKind::NEXT_STEP, std::nullopt);
      prev = sid;
    }
    for (const auto& b : p.postamble) {
      ++order;
      block(id, path + "/b" + std::to_string(order), b, order, "postamble");
    }
    return id;
  }

  std::string step(const std::string& path, const Step& s) {
    const auto id = add(GraphNodeKind::Step, "step", path, s.span,
                        {{"index", s.index},
                         {"step_type", to_string(s.step_type)},
                         {"title", s.title},
                         {"span", span_json(s.span)},
                         {"title_span", span_json(s.title_span)}});
    unit(s.title_span, id, GraphNodeKind::Step);
    int order = 0;
    for (const auto& b : s.content) {
      ++order;
      block(id, path + "/b" + std::to_string(order), b, order);
    }
    order = 0;
    for (const auto& p : s.nested) {
      ++order;
      const auto pid = procedure(path + "/n" + std::to_string(order), p);
      edge(id, pid, EdgeKind::HAS_NESTED, order);
    }
    order = 0;
    for (const auto& c : s.conditionals) {
      ++order;
      const auto cid = add(GraphNodeKind::ConditionalBlock, "cond",
                           path + "/c" + std::to_string(order), c.condition_span,
                           {{"marker", c.marker},
                            {"condition", c.condition_text},
                            {"effect", c.effect_text},
                            {"source", to_string(c.source)},
                            {"condition_span", span_json(c.condition_span)},
                            {"effect_span", span_json(c.effect_span)}});
      edge(id, cid, EdgeKind::HAS_CONDITION, order);
    }
    return id;
  }

  const DocumentOutline& outline_;
  const CorpusMeta& meta_;
  std::string url_;
  std::string doc_id_;
  SectionType section_ = SectionType::Other;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<Unit> units_;
};

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw SchemaError(path, what);
}

}  // namespace

std::string_view to_string(GraphNodeKind k) { return kNodeKinds[static_cast<int>(k)]; }

std::optional<GraphNodeKind> graph_node_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kNodeKinds); ++i) {
    if (kNodeKinds[i] == s) return static_cast<GraphNodeKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(EdgeKind k) { return kEdgeKinds[static_cast<int>(k)]; }

std::optional<EdgeKind> edge_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kEdgeKinds); ++i) {
    if (kEdgeKinds[i] == s) return static_cast<EdgeKind>(i);
  }
  return std::nullopt;
}

bool is_containment(EdgeKind k) {
  switch (k) {
    case EdgeKind::HAS_SECTION:
    case EdgeKind::HAS_CONTENT:
    case EdgeKind::HAS_PROCEDURE:
    case EdgeKind::HAS_STEP:
    case EdgeKind::HAS_NESTED:
    case EdgeKind::HAS_CONDITION:
      return true;
    default:
      return false;
  }
}

bool edge_less(const GraphEdge& a, const GraphEdge& b) {
  const auto key = [](const GraphEdge& e) {
    return std::make_tuple(std::string_view(e.src), to_string(e.kind), e.order.has_value(),
                           e.order.value_or(0), std::string_view(e.dst));
  };
  return key(a) < key(b);
}

const GraphNode* Micrograph::find(std::string_view id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const GraphNode& n, std::string_view v) { return n.id < v; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

std::string make_node_id(std::string_view prefix, std::string_view material) {
  return std::string(prefix) + ":" + text::sha256_hex(material).substr(0, 16);
}

std::string entity_node_id(std::string_view canonical, std::string_view entity_type) {
  return make_node_id("ent", std::string(canonical) + "\x1f" + std::string(entity_type));
}

std::string action_node_id(std::string_view canonical) { return make_node_id("act", canonical); }

Micrograph build_micrograph(const DocumentOutline& outline,
                            const std::vector<SectionContent>& contents,
                            const std::vector<Mention>& mentions, const CorpusMeta& meta) {
  Builder b(outline, meta);
  b.build(contents);
  b.attach(mentions);
  return b.finish();
}

std::vector<TextUnit> collect_text_units(const DocumentOutline& outline,
                                         const std::vector<SectionContent>& contents,
                                         const CorpusMeta& meta) {
  Builder b(outline, meta);
  b.build(contents);
  return b.units();
}

json to_json(const Micrograph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes)
    nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"props", n.props}});
  json edges = json::array();
  for (const auto& e : g.edges) {
    json j = {{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}};
    if (e.order) j["order"] = *e.order;
    if (!e.props.is_null()) j["props"] = e.props;
    edges.push_back(std::move(j));
  }
  return {{"schema_version", g.schema_version},
          {"document", g.document},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

std::string serialize_canonical(const Micrograph& g) {
  return to_json(g).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

Micrograph micrograph_from_json(const json& j) {
  if (!j.is_object()) bad("", "micrograph must be an object");
  for (const char* key : {"schema_version", "document"}) {
    if (!j.contains(key) || !j[key].is_string()) bad(key, "missing or not a string");
  }
  for (const char* key : {"nodes", "edges"}) {
    if (!j.contains(key) || !j[key].is_array()) bad(key, "missing or not an array");
  }
  Micrograph g;
  g.schema_version = j["schema_version"].get<std::string>();
  g.document = j["document"].get<std::string>();
  for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
    const auto& n = j["nodes"][i];
    const auto path = "nodes[" + std::to_string(i) + "]";
    if (!n.is_object() || !n.contains("id") || !n["id"].is_string()) bad(path + ".id", "missing id");
    if (!n.contains("kind") || !n["kind"].is_string()) bad(path + ".kind", "missing kind");
    auto kind = graph_node_kind_from_string(n["kind"].get<std::string>());
    if (!kind) bad(path + ".kind", "unknown node kind");
    GraphNode node{n["id"].get<std::string>(), *kind, n.value("props", json::object())};
    if (!node.props.is_object()) bad(path + ".props", "props must be an object");
    g.nodes.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const auto& e = j["edges"][i];
    const auto path = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) bad(path, "edge must be an object");
    for (const char* key : {"src", "dst", "kind"}) {
      if (!e.contains(key) || !e[key].is_string()) bad(path + "." + key, "missing or not a string");
    }
    auto kind = edge_kind_from_string(e["kind"].get<std::string>());
    if (!kind) bad(path + ".kind", "unknown edge kind");
    GraphEdge edge{e["src"].get<std::string>(), e["dst"].get<std::string>(), *kind, std::nullopt,
                   e.contains("props") ? e["props"] : json(nullptr)};
    if (e.contains("order")) {
      if (!e["order"].is_number_integer()) bad(path + ".order", "order must be an integer");
      edge.order = e["order"].get<int>();
    }
    g.edges.push_back(std::move(edge));
  }
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  std::sort(g.edges.begin(), g.edges.end(), edge_less);
  return g;
}

Micrograph parse_micrograph(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("micrograph is not JSON: ") + e.what());
  }
  return micrograph_from_json(j);
}

}  // namespace micrograph
