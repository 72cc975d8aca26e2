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

#include <gtest/gtest.h>

#include <json.hpp>

#include "micrograph/error.hpp"
#include "micrograph/micrograph_builder.hpp"
#include "micrograph/pipeline.hpp"
#include "test_support.hpp"

using namespace micrograph;
using testing_support::test_meta;
using nlohmann::json;

namespace {

Micrograph build(std::string_view html) { return process_page(html, test_meta(), {}, "file:t").graph; }

std::size_t count(const Micrograph& g, GraphNodeKind k) {
  return std::count_if(g.nodes.begin(), g.nodes.end(), [&](const auto& n) { return n.kind == k; });
}
std::size_t count(const Micrograph& g, EdgeKind k) {
  return std::count_if(g.edges.begin(), g.edges.end(), [&](const auto& e) { return e.kind == k; });
}

bool has_rule(const std::vector<Violation>& vs, std::string_view rule) {
  return std::any_of(vs.begin(), vs.end(), [&](const auto& v) { return v.rule == rule; });
}

// Removing non-containment edges leaves a tree rooted at the Document whose
// nodes are everything except Entity, Action and Constraint.
void check_containment_tree(const Micrograph& g) {
  std::map<std::string, int> parents;
  std::map<std::string, std::vector<std::string>> kids;
  for (const auto& e : g.edges)
    if (is_containment(e.kind)) {
      ++parents[e.dst];
      kids[e.src].push_back(e.dst);
    }
  std::set<std::string> seen{g.document};
  std::vector<std::string> stack{g.document};
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    for (const auto& k : kids[id]) {
      ASSERT_TRUE(seen.insert(k).second) << k;
      stack.push_back(k);
    }
  }
  for (const auto& n : g.nodes) {
    const bool linked = n.kind == GraphNodeKind::Entity || n.kind == GraphNodeKind::Action ||
                        n.kind == GraphNodeKind::Constraint;
    EXPECT_EQ(seen.count(n.id), linked ? 0u : 1u) << n.id;
    if (!linked && n.id != g.document) EXPECT_EQ(parents[n.id], 1) << n.id;
  }
}

}  // namespace

TEST(BuildMicrograph, EmptySection) {
  const auto g = build("<html><head><title>T</title></head><body><h2>Symptom</h2></body></html>");
  EXPECT_EQ(g.nodes.size(), 2u);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].kind, EdgeKind::HAS_SECTION);
  EXPECT_EQ(g.edges[0].order, 1);
}

TEST(BuildMicrograph, TwoStepChain) {
  const auto g = build("<h1>T</h1><h2>Solution</h2><ol><li>Stop it.</li><li>Start it.</li></ol>");
  EXPECT_EQ(count(g, EdgeKind::NEXT_STEP), 1u);
  std::set<int> orders;
  for (const auto& e : g.edges)
    if (e.kind == EdgeKind::HAS_STEP) orders.insert(*e.order);
  EXPECT_EQ(orders, (std::set<int>{1, 2}));
}

TEST(BuildMicrograph, HandCountedPage) {
  // Document, 2 sections, 1 procedure, 3 steps, 1 entity: 8 nodes.
  const auto g = build(
      "<h1>Moving the catalog</h1><h2>Symptom</h2><h2>Solution</h2>"
      "<p>1. Back up DB2.</p><p>2. Move the catalog.</p><p>3. Recatalog DB2.</p>");
  EXPECT_EQ(g.nodes.size(), 8u);
  EXPECT_EQ(count(g, GraphNodeKind::Entity), 1u);
  EXPECT_EQ(count(g, EdgeKind::MENTIONS), 2u);
  const auto ent = std::find_if(g.nodes.begin(), g.nodes.end(),
                                [](const auto& n) { return n.kind == GraphNodeKind::Entity; });
  for (const auto& e : g.edges)
    if (e.kind == EdgeKind::MENTIONS) {
      EXPECT_EQ(e.dst, ent->id);
      EXPECT_EQ(g.find(e.src)->kind, GraphNodeKind::Step);
      EXPECT_EQ(e.props["surface"], "DB2");
    }
}

TEST(BuildMicrograph, DeterministicIds) {
  EXPECT_EQ(text::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(make_node_id("doc", "https://e.com"), "doc:" + text::sha256_hex("https://e.com").substr(0, 16));
  EXPECT_EQ(entity_node_id("DB2", "product"), "ent:" + text::sha256_hex(std::string("DB2\x1f" "product")).substr(0, 16));
  EXPECT_EQ(action_node_id("restart"), "act:" + text::sha256_hex("restart").substr(0, 16));
  const auto g = build(testing_support::read_file(testing_support::fixtures() / "corpus/01_ordered_list.html"));
  EXPECT_EQ(g.document, make_node_id("doc", "https://support.example.com/technote/0001"));
}

TEST(BuildMicrograph, MentionOutsideUnitsIsConsistencyError) {
  const auto r = process_page("<h1>T</h1><h2>Solution</h2><p>Restart DB2.</p>", test_meta(), {}, "file:t");
  auto ms = r.mentions;
  ASSERT_FALSE(ms.empty());
  ms[0].span = Span{500, 503};
  EXPECT_THROW(build_micrograph(r.outline, r.contents, ms, test_meta()), ConsistencyError);
  auto contents = r.contents;
  contents.pop_back();
  EXPECT_THROW(build_micrograph(r.outline, contents, r.mentions, test_meta()), ConsistencyError);
}

TEST(BuildMicrograph, ConstraintsAndLinks) {
  const auto g = build(testing_support::read_file(testing_support::fixtures() / "corpus/20_entities_constraints.html"));
  EXPECT_GE(count(g, GraphNodeKind::Constraint), 1u);
  EXPECT_EQ(count(g, GraphNodeKind::Constraint), count(g, EdgeKind::CONSTRAINED_BY));
  for (const auto& e : g.edges)
    if (e.kind == EdgeKind::CONSTRAINED_BY) EXPECT_EQ(e.src, g.document);
  const auto h = build(testing_support::read_file(testing_support::fixtures() / "corpus/15_code_images_links.html"));
  bool link = false;
  for (const auto& n : h.nodes)
    if (n.kind == GraphNodeKind::ContentBlock && n.props.value("content_kind", "") == "Hyperlink")
      link = n.props.contains("links_to");
  EXPECT_TRUE(link);
}

TEST(Serialize, CanonicalAndRoundTrip) {
  for (const auto& p : testing_support::corpus_pages()) {
    SCOPED_TRACE(p.string());
    const auto g = build(testing_support::read_file(p));
    const auto bytes = serialize_canonical(g);
    EXPECT_EQ(bytes, serialize_canonical(g));
    EXPECT_EQ(bytes.back(), '\n');
    EXPECT_EQ(bytes.find('\n'), bytes.size() - 1);
    EXPECT_EQ(bytes, json::parse(bytes).dump() + "\n");  // sorted keys, compact
    EXPECT_EQ(parse_micrograph(bytes), g);
    EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end(), edge_less));
    EXPECT_TRUE(std::is_sorted(g.nodes.begin(), g.nodes.end(),
                               [](const auto& a, const auto& b) { return a.id < b.id; }));
    EXPECT_TRUE(validate_schema(bytes).empty()) << validate_schema(bytes).front().message;
    check_containment_tree(g);
  }
  EXPECT_THROW(parse_micrograph("{"), SyntaxError);
  EXPECT_THROW(parse_micrograph(R"({"nodes": 1})"), SchemaError);
}

TEST(ValidateSchema, FaultInjections) {
  const auto g = build(testing_support::read_file(testing_support::fixtures() / "corpus/14_conditional_steps.html"));
  const auto base = to_json(g);
  ASSERT_TRUE(validate_micrograph(base).empty());

  auto j = base;
  j["edges"].push_back({{"src", g.document}, {"dst", "blk:0000000000000000"}, {"kind", "HAS_SECTION"}, {"order", 99}});
  EXPECT_TRUE(has_rule(validate_micrograph(j), "unknown dst"));

  j = base;
  j["nodes"].push_back(j["nodes"][1]);
  EXPECT_TRUE(has_rule(validate_micrograph(j), "duplicate id"));

  j = base;
  for (auto& n : j["nodes"])
    if (n["kind"] == "Step") {
      n["props"].erase("step_type");
      break;
    }
  EXPECT_TRUE(has_rule(validate_micrograph(j), "missing prop"));

  j = base;
  j["nodes"].push_back({{"id", "doc:ffffffffffffffff"}, {"kind", "Document"},
                        {"props", {{"url", "x"}, {"title", ""}, {"doc_type", "unknown"}, {"corpus_id", "c"}}}});
  EXPECT_TRUE(has_rule(validate_micrograph(j), "single-Document rule"));

  j = base;
  std::string step;
  for (const auto& n : j["nodes"])
    if (n["kind"] == "Step") step = n["id"];
  std::string section;
  for (const auto& n : j["nodes"])
    if (n["kind"] == "Section") section = n["id"];
  j["edges"].push_back({{"src", step}, {"dst", section}, {"kind", "HAS_NESTED"}, {"order", 7}});
  EXPECT_TRUE(has_rule(validate_micrograph(j), "containment cycle"));
}

TEST(ValidateSchema, OtherRules) {
  const auto g = build(testing_support::read_file(testing_support::fixtures() / "corpus/01_ordered_list.html"));
  auto j = to_json(g);
  j["schema_version"] = "9.9";
  EXPECT_TRUE(has_rule(validate_micrograph(j), "schema_version"));
  j = to_json(g);
  j["nodes"][0]["kind"] = "Widget";
  EXPECT_TRUE(has_rule(validate_micrograph(j), "unknown kind"));
  j = to_json(g);
  for (auto& e : j["edges"])
    if (e["kind"] == "HAS_STEP") e["order"] = 1;
  EXPECT_TRUE(has_rule(validate_micrograph(j), "duplicate order"));
  j = to_json(g);
  for (auto& e : j["edges"])
    if (e["kind"] == "HAS_SECTION") e["order"] = 0;
  EXPECT_TRUE(has_rule(validate_micrograph(j), "structure"));
  EXPECT_THROW(validate_schema("not json"), SyntaxError);
  EXPECT_NE(schema_document().find("\"$schema\""), std::string_view::npos);
}

// Builder output validates for generated pages too.
TEST(BuildMicrograph, GeneratedPagesValidate) {
  testing_support::PageGenerator gen(17);
  for (int i = 0; i < 150; ++i) {
    const auto html = gen.page();
    SCOPED_TRACE(html);
    const auto g = build(html);
    const auto vs = validate_schema(serialize_canonical(g));
    ASSERT_TRUE(vs.empty()) << vs.front().rule << ": " << vs.front().message;
    check_containment_tree(g);
    std::set<std::pair<std::string, std::string>> ents;
    for (const auto& n : g.nodes)
      if (n.kind == GraphNodeKind::Entity)
        ASSERT_TRUE(ents.insert({n.props["canonical"].get<std::string>(), n.props["entity_type"].get<std::string>()}).second);
  }
}
