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

#include "micrograph/error.hpp"
#include "micrograph/html_model.hpp"
#include "test_support.hpp"

using namespace micrograph;

namespace {

const DomNode* first_tag(const DomDocument& d, std::string_view tag) {
  for (const auto& n : d.nodes)
    if (n.is(tag)) return &n;
  return nullptr;
}

// Structural checks shared by the examples and the property test.
void check_tree(const DomDocument& d) {
  ASSERT_EQ(text_of(d, d.root), d.page_text);
  std::vector<Span> spans;
  for (const auto& n : d.nodes) {
    ASSERT_EQ(n.id, static_cast<NodeId>(&n - d.nodes.data()));
    if (n.is_text()) {
      ASSERT_TRUE(n.children.empty());
      ASSERT_EQ(n.text, d.page_text.substr(n.span.start, n.span.size()));
      spans.push_back(n.span);
    }
    NodeId prev = n.id;
    std::size_t prev_end = n.span.start;
    for (auto c : n.children) {
      const auto& ch = d.nodes[c];
      ASSERT_GT(c, prev);
      ASSERT_EQ(*ch.parent, n.id);
      ASSERT_LE(n.span.start, ch.span.start);
      ASSERT_LE(ch.span.end, n.span.end);
      if (!ch.span.empty()) {
        ASSERT_GE(ch.span.start, prev_end);
        prev_end = ch.span.end;
      }
      prev = c;
    }
  }
  // Text spans never overlap, and whatever lies between them is a single
  // separator space.
  std::sort(spans.begin(), spans.end(), [](Span a, Span b) { return a.start < b.start; });
  std::size_t at = 0;
  for (const auto& s : spans) {
    if (s.empty()) continue;
    ASSERT_GE(s.start, at);
    ASSERT_LE(s.start - at, 1u);
    if (s.start > at) ASSERT_EQ(d.page_text[at], ' ');
    at = s.end;
  }
  ASSERT_EQ(at, d.page_text.size());
}

}  // namespace

TEST(HtmlModel, SingleParagraph) {
  const auto d = parse_html("<p>a</p>");
  EXPECT_EQ(d.page_text, "a");
  const auto* p = first_tag(d, "p");
  ASSERT_NE(p, nullptr);
  ASSERT_EQ(p->children.size(), 1u);
  const auto& t = d.nodes[p->children[0]];
  EXPECT_TRUE(t.is_text());
  EXPECT_EQ(t.text, "a");
  EXPECT_EQ(t.span, (Span{0, 1}));
}

TEST(HtmlModel, UnclosedRecovers) {
  const auto a = parse_html("<p>a");
  const auto b = parse_html("<p>a</p>");
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    EXPECT_EQ(a.nodes[i].tag, b.nodes[i].tag);
    EXPECT_EQ(a.nodes[i].span, b.nodes[i].span);
    EXPECT_EQ(a.nodes[i].children, b.nodes[i].children);
  }
}

TEST(HtmlModel, PreorderIds) {
  const auto d = parse_html("<div><ol><li>x</li></ol></div>");
  const auto* div = first_tag(d, "div");
  const auto* ol = first_tag(d, "ol");
  const auto* li = first_tag(d, "li");
  ASSERT_TRUE(div && ol && li);
  ASSERT_EQ(li->children.size(), 1u);
  const auto text = li->children[0];
  EXPECT_LT(div->id, ol->id);
  EXPECT_LT(ol->id, li->id);
  EXPECT_LT(li->id, text);
  EXPECT_EQ(ol->id, div->id + 1);
  EXPECT_EQ(li->id, ol->id + 1);
  EXPECT_EQ(text, li->id + 1);
  EXPECT_EQ(div->span, (Span{0, 1}));
  EXPECT_EQ(li->span, (Span{0, 1}));
  check_tree(d);
}

TEST(HtmlModel, TextOf) {
  const auto d = parse_html("<div><span>a</span><span> b </span></div>");
  const auto* div = first_tag(d, "div");
  EXPECT_EQ(text_of(d, div->id), "a b");
  const auto* span = first_tag(d, "span");
  EXPECT_EQ(text_of(d, span->children[0]), "a");
  const auto e = parse_html("<div></div>");
  EXPECT_EQ(text_of(e, e.root), "");
  EXPECT_THROW(text_of(e, 9999), UnknownNode);
}

TEST(HtmlModel, WhitespaceAndBlocks) {
  const auto d = parse_html("<p>  one\n\t two </p><p>three</p>four<b>five</b>");
  EXPECT_EQ(d.page_text, "one two three fourfive");
  check_tree(d);
}

TEST(HtmlModel, ScriptStyleCommentsExcluded) {
  const auto d = parse_html("<p>a</p><script>var x = 1;</script><style>p{}</style><!-- hi --><p>b</p>");
  EXPECT_EQ(d.page_text, "a b");
  const auto* script = first_tag(d, "script");
  ASSERT_NE(script, nullptr);
  EXPECT_TRUE(script->span.empty());
  check_tree(d);
}

TEST(HtmlModel, EntitiesAndAttributes) {
  const auto d = parse_html(R"(<a href="x?a=1&amp;b=2">R&amp;D &lt;tag&gt; &#233;&nbsp;x</a>)");
  EXPECT_EQ(d.page_text, "R&D <tag> \xC3\xA9 x");
  EXPECT_EQ(first_tag(d, "a")->attr("href"), "x?a=1&b=2");
}

TEST(HtmlModel, HeadMetadata) {
  const auto d = parse_html(
      R"(<html><head><title>T</title><link rel="canonical" href="https://e.com/x"></head><body><p>a</p></body></html>)");
  EXPECT_EQ(d.source_url, "https://e.com/x");
  EXPECT_EQ(d.head_title, "T");
  EXPECT_EQ(d.page_text, "a");
}

TEST(HtmlModel, Errors) {
  EXPECT_THROW(parse_html(""), EmptyDocument);
  EXPECT_THROW(parse_html("\xFF\xFEabc"), EncodingError);
}

TEST(HtmlModel, InvalidUtf8Truncates) {
  const auto d = parse_html("<p>ok</p><p>bad \xFF\xFE tail</p>");
  ASSERT_TRUE(d.truncated_at.has_value());
  EXPECT_EQ(d.page_text.rfind("tail"), std::string::npos);
  check_tree(d);
}

TEST(HtmlModel, GeneratedPagesKeepInvariants) {
  testing_support::PageGenerator gen(2024);
  for (int i = 0; i < 200; ++i) {
    const auto html = gen.page();
    const auto a = parse_html(html);
    SCOPED_TRACE(html);
    check_tree(a);
    const auto b = parse_html(html);
    ASSERT_EQ(a.page_text, b.page_text);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
      ASSERT_EQ(a.nodes[k].span, b.nodes[k].span);
      ASSERT_EQ(a.nodes[k].tag, b.nodes[k].tag);
    }
  }
}

TEST(HtmlModel, CorpusPagesKeepInvariants) {
  for (const auto& p : testing_support::corpus_pages()) {
    SCOPED_TRACE(p.string());
    check_tree(parse_html(testing_support::read_file(p)));
  }
}
