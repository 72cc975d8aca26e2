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

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "micrograph/error.hpp"
#include "micrograph/micrograph_builder.hpp"

namespace micrograph {
namespace detail {
extern const std::string_view kSchemaDocument;
}  // namespace detail

namespace {

using nlohmann::json;

struct Rules {
  std::set<std::string> versions;
  std::set<std::string> node_kinds;
  std::set<std::string> edge_kinds;
  std::map<std::string, std::vector<std::string>> required_props;
  std::vector<std::string> top_required;
  std::vector<std::string> node_required;
  std::vector<std::string> edge_required;
};

const Rules& rules() {
  static const Rules r = [] {
    const auto s = json::parse(detail::kSchemaDocument);
    Rules out;
    for (const auto& v : s["properties"]["schema_version"]["enum"]) out.versions.insert(v.get<std::string>());
    const auto& node = s["$defs"]["node"];
    const auto& edge = s["$defs"]["edge"];
    for (const auto& k : node["properties"]["kind"]["enum"]) out.node_kinds.insert(k.get<std::string>());
    for (const auto& k : edge["properties"]["kind"]["enum"]) out.edge_kinds.insert(k.get<std::string>());
    for (const auto& clause : node["allOf"]) {
      const auto kind = clause["if"]["properties"]["kind"]["const"].get<std::string>();
      out.required_props[kind] =
          clause["then"]["properties"]["props"]["required"].get<std::vector<std::string>>();
    }
    out.top_required = s["required"].get<std::vector<std::string>>();
    out.node_required = node["required"].get<std::vector<std::string>>();
    out.edge_required = edge["required"].get<std::vector<std::string>>();
    return out;
  }();
  return r;
}

std::string edge_subject(const json& e) {
  auto str = [&](const char* k) {
    return e.contains(k) && e[k].is_string() ? e[k].get<std::string>() : std::string("?");
  };
  return str("src") + " -" + str("kind") + "-> " + str("dst");
}

bool is_containment_name(const std::string& k) {
  auto kind = edge_kind_from_string(k);
  return kind && is_containment(*kind);
}

}  // namespace

std::string_view schema_document() { return detail::kSchemaDocument; }

std::vector<Violation> validate_micrograph(const json& j) {
  const auto& R = rules();
  std::vector<Violation> out;
  auto report = [&](std::string rule, std::string subject, std::string message) {
    out.push_back({std::move(rule), std::move(subject), std::move(message)});
  };

  if (!j.is_object()) {
    report("structure", "", "micrograph must be a JSON object");
    return out;
  }
  for (const auto& key : R.top_required) {
    if (!j.contains(key)) report("structure", key, "missing top-level field");
  }
  if (!j.contains("nodes") || !j["nodes"].is_array() || !j.contains("edges") ||
      !j["edges"].is_array())
    return out;

  if (!j.contains("schema_version") || !j["schema_version"].is_string() ||
      !R.versions.count(j["schema_version"].get<std::string>()))
    report("schema_version", "", "unknown schema_version");

  std::map<std::string, std::string> kind_of;  // node id -> kind
  std::string document_id;
  int documents = 0;
  for (const auto& n : j["nodes"]) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_string()) {
      report("structure", "", "node without a string id");
      continue;
    }
    const auto id = n["id"].get<std::string>();
    for (const auto& key : R.node_required) {
      if (!n.contains(key)) report("structure", id, "node missing field " + key);
    }
    const auto kind = n.contains("kind") && n["kind"].is_string() ? n["kind"].get<std::string>() : "";
    if (!R.node_kinds.count(kind)) {
      report("unknown kind", id, "node kind '" + kind + "'");
    } else {
      const auto& props = n.contains("props") && n["props"].is_object() ? n["props"] : json::object();
      for (const auto& p : R.required_props.at(kind)) {
        if (!props.contains(p)) report("missing prop", id, kind + " requires '" + p + "'");
      }
    }
    if (kind_of.count(id)) report("duplicate id", id, "node id appears more than once");
    kind_of[id] = kind;
    if (kind == "Document") {
      ++documents;
      document_id = id;
    }
  }
  if (documents != 1)
    report("single-Document rule", "", std::to_string(documents) + " Document nodes");
  if (documents == 1 && (!j.contains("document") || j["document"] != document_id))
    report("document ref", document_id, "top-level document does not name the Document node");

  std::map<std::string, std::vector<std::string>> children;
  std::map<std::string, int> parents;
  std::map<std::string, int> mentioned, constrained;
  std::map<std::tuple<std::string, std::string, int>, int> orders;
  std::map<std::string, std::vector<std::pair<int, std::string>>> steps_of;
  std::set<std::pair<std::string, std::string>> next_edges;
  for (const auto& e : j["edges"]) {
    const auto subject = edge_subject(e);
    if (!e.is_object()) {
      report("structure", subject, "edge must be an object");
      continue;
    }
    bool complete = true;
    for (const auto& key : R.edge_required) {
      if (!e.contains(key) || !e[key].is_string()) {
        report("structure", subject, "edge missing field " + key);
        complete = false;
      }
    }
    if (!complete) continue;
    const auto src = e["src"].get<std::string>();
    const auto dst = e["dst"].get<std::string>();
    const auto kind = e["kind"].get<std::string>();
    if (!R.edge_kinds.count(kind)) report("unknown kind", subject, "edge kind '" + kind + "'");
    const bool src_ok = kind_of.count(src) > 0, dst_ok = kind_of.count(dst) > 0;
    if (!src_ok) report("unknown src", subject, "edge source is not a node");
    if (!dst_ok) report("unknown dst", subject, "edge target is not a node");
    std::optional<int> order;
    if (e.contains("order")) {
      if (e["order"].is_number_integer() && e["order"].get<long long>() >= 1)
        order = e["order"].get<int>();
      else
        report("structure", subject, "order must be a positive integer");
    }
    if (order && (kind == "HAS_SECTION" || kind == "HAS_STEP" || kind == "HAS_CONTENT")) {
      if (++orders[{src, kind, *order}] == 2)
        report("duplicate order", subject, kind + " order " + std::to_string(*order) + " repeats");
    }
    if (!src_ok || !dst_ok) continue;
    if (is_containment_name(kind)) {
      children[src].push_back(dst);
      if (++parents[dst] == 2) report("multiple parents", dst, "node has two containment parents");
    }
    if (kind == "MENTIONS") ++mentioned[dst];
    if (kind == "CONSTRAINED_BY") ++constrained[dst];
    if (kind == "HAS_STEP") steps_of[src].emplace_back(order.value_or(0), dst);
    if (kind == "NEXT_STEP") {
      if (kind_of[src] != "Step" || kind_of[dst] != "Step")
        report("NEXT_STEP path", subject, "NEXT_STEP must join two steps");
      next_edges.insert({src, dst});
    }
  }

  // NEXT_STEP must be exactly the chain through each procedure's steps.
  std::set<std::pair<std::string, std::string>> expected;
  for (auto& [proc, steps] : steps_of) {
    std::sort(steps.begin(), steps.end());
    for (std::size_t i = 1; i < steps.size(); ++i) expected.insert({steps[i - 1].second, steps[i].second});
  }
  for (const auto& p : next_edges) {
    if (!expected.count(p)) report("NEXT_STEP path", p.first + " -NEXT_STEP-> " + p.second, "edge is not on a procedure's step chain");
  }
  for (const auto& p : expected) {
    if (!next_edges.count(p)) report("NEXT_STEP path", p.first + " -NEXT_STEP-> " + p.second, "missing link in step chain");
  }

  // Containment must be a tree under the Document.
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  std::function<void(const std::string&)> dfs = [&](const std::string& id) {
    state[id] = 1;
    for (const auto& c : children[id]) {
      if (state[c] == 1) {
        report("containment cycle", c, "containment edges form a cycle");
      } else if (state[c] == 0) {
        dfs(c);
      }
    }
    state[id] = 2;
  };
  if (documents == 1) dfs(document_id);
  for (const auto& [id, kind] : kind_of) {
    if (kind == "Document" || state[id] != 0) continue;
    if (kind == "Entity" || kind == "Action") {
      if (!mentioned[id]) report("unreachable node", id, kind + " has no MENTIONS edge");
    } else if (kind == "Constraint") {
      if (!constrained[id]) report("unreachable node", id, "Constraint has no CONSTRAINED_BY edge");
    } else if (R.node_kinds.count(kind)) {
      // Cycles detached from the Document are never visited from it.
      dfs(id);
      report("unreachable node", id, "not reachable from the Document by containment");
    }
  }
  return out;
}

std::vector<Violation> validate_schema(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("micrograph is not JSON: ") + e.what());
  }
  return validate_micrograph(j);
}

}  // namespace micrograph
