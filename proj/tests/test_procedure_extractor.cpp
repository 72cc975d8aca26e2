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
#include "micrograph/procedure_extractor.hpp"
#include "micrograph/region.hpp"
#include "micrograph/section_segmenter.hpp"
#include "test_support.hpp"

using namespace micrograph;
using testing_support::test_meta;

namespace {

struct Page {
  DomDocument doc;
  DocumentOutline outline;

  explicit Page(std::string_view html) : doc(parse_html(html)), outline(segment(doc, test_meta())) {}

  const Section& section(SectionType t) const {
    for (const auto& s : outline.sections)
      if (s.section_type == t) return s;
    throw std::runtime_error("no such section");
  }
  const Section& solution() const { return section(SectionType::Solution); }

  std::vector<Procedure> procedures(ExtractionOptions opts = {},
                                    std::vector<Diagnostic>* diags = nullptr) const {
    EntityLinker linker(test_meta());
    BaselineAnnotator annotator(test_meta().condition_markers, test_meta().action_lexicon);
    ExtractionContext ctx{test_meta(), &linker, &annotator, opts, diags};
    return extract_procedure(solution(), doc, ctx);
  }
};

std::vector<std::string> texts(const std::vector<ContentBlock>& blocks) {
  std::vector<std::string> out;
  for (const auto& b : blocks) out.push_back(b.text);
  return out;
}

int tree_levels(const std::vector<Procedure>& ps) {
  int best = 0;
  for (const auto& p : ps) {
    int inner = 0;
    for (const auto& s : p.steps) inner = std::max(inner, tree_levels(s.nested));
    best = std::max(best, 1 + inner);
  }
  return best;
}

std::size_t flat_steps(const std::vector<Procedure>& ps) {
  std::size_t n = 0;
  for (const auto& p : ps)
    for (const auto& s : p.steps) n += 1 + flat_steps(s.nested);
  return n;
}

const DomNode& nth_tag(const DomDocument& d, std::string_view tag, int n) {
  for (const auto& node : d.nodes)
    if (node.is(tag) && n-- == 0) return node;
  throw std::runtime_error("missing tag");
}

}  // namespace

TEST(FindStepSets, OrderedList) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>a</li><li>b</li><li>c</li></ol>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].generator, StepGenerator::OrderedList);
  EXPECT_EQ(sets[0].anchors.size(), 3u);
  EXPECT_EQ(sets[0].common_ancestor, nth_tag(p.doc, "ol", 0).id);
}

TEST(FindStepSets, NumberedParagraphs) {
  Page p("<h1>T</h1><h2>Solution</h2><p>1. unzip</p><p>2. run setup</p>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].generator, StepGenerator::NumberedParagraphs);
  EXPECT_EQ(sets[0].anchors.size(), 2u);
}

TEST(FindStepSets, HeadingsAroundListListedFirst) {
  Page p("<h1>T</h1><h2>Solution</h2><p><b>Step 1</b></p><ol><li>a</li><li>b</li></ol>"
         "<p><b>Step 2</b></p><p>c</p>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].generator, StepGenerator::StepHeadings);
  EXPECT_EQ(sets[1].generator, StepGenerator::OrderedList);
  EXPECT_LT(sets[0].extent.start, sets[1].extent.start);
}

TEST(FindStepSets, AllFiveGenerators) {
  Page p(
      "<h1>T</h1><h2>Solution</h2>"
      "<ol><li>a</li><li>b</li></ol>"
      "<p>1. c</p><p>2. d</p>"
      "<h3>Step 1: e</h3><p>f</p><h3>Step 2: g</h3>"
      "<table><tr><td>1</td><td>h</td></tr><tr><td>2</td><td>i</td></tr></table>"
      "<ul><li>1. j</li><li>2. k</li></ul>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  std::set<StepGenerator> seen;
  for (const auto& s : sets) seen.insert(s.generator);
  EXPECT_EQ(seen.size(), 5u);
  for (std::size_t i = 1; i < sets.size(); ++i)
    EXPECT_TRUE(sets[i - 1].extent.start < sets[i].extent.start ||
                (sets[i - 1].extent.start == sets[i].extent.start &&
                 sets[i - 1].generator < sets[i].generator));
}

TEST(FindStepSets, RejectsSingletonsAndBrokenRuns) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>only</li></ol><p>1. a</p><p>3. b</p>"
         "<ul><li>1. x</li><li>y</li></ul>");
  EXPECT_TRUE(find_step_sets(p.solution(), p.doc, test_meta()).empty());
}

TEST(ParseNumbering, Forms) {
  std::size_t len = 0;
  EXPECT_EQ(parse_numbering("1. a", &len), 1);
  EXPECT_EQ(len, 2u);
  EXPECT_EQ(parse_numbering("2) Run setup", &len), 2);
  EXPECT_EQ(parse_numbering("(3) go", &len), 3);
  EXPECT_EQ(len, 3u);
  EXPECT_EQ(parse_numbering("12.", &len), 12);
  EXPECT_FALSE(parse_numbering("1.5 release"));
  EXPECT_FALSE(parse_numbering("v1. x"));
  EXPECT_FALSE(parse_numbering(""));
}

TEST(Coverage, FullExtentIsOne) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>aaaa</li><li>bbbb</li></ol>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_DOUBLE_EQ(coverage(sets[0], p.solution(), p.doc), 1.0);
}

TEST(Coverage, FortyOfHundred) {
  // 60 characters of preamble (more than a quarter, so it counts), then a
  // list holding 40 characters.
  const std::string pre(60, 'p');
  const std::string item(20, 'i');
  Page p("<h1>T</h1><h2>Solution</h2><p>" + pre + "</p><ol><li>" + item + "</li><li>" + item +
         "</li></ol>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 1u);
  const auto body = p.solution().body(p.doc);
  EXPECT_DOUBLE_EQ(testing_support::oracle_coverage(sets[0], body, p.doc), 0.4);
  EXPECT_DOUBLE_EQ(coverage(sets[0], p.solution(), p.doc), 0.4);
}

TEST(Coverage, ShortPreambleExcluded) {
  const std::string pre(20, 'p');
  const std::string item(40, 'i');
  Page p("<h1>T</h1><h2>Solution</h2><p>" + pre + "</p><ol><li>" + item + "</li><li>" + item +
         "</li></ol>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_DOUBLE_EQ(coverage(sets[0], p.solution(), p.doc), 1.0);
}

TEST(Coverage, EmptyBodyIsZero) {
  Page p("<h1>T</h1><h2>Solution</h2><h2>Symptom</h2><p>x</p>");
  StepSet s;
  s.anchors = {0};
  EXPECT_EQ(coverage(s, p.solution(), p.doc), 0.0);
}

namespace {

// Twenty five-character paragraphs; stepsets are carved out of them by
// hand so coverage can be set exactly.
struct Paragraphs {
  Page page;
  std::vector<NodeId> ps;

  Paragraphs() : page(make()) {
    for (const auto& n : page.doc.nodes)
      if (n.is("p")) ps.push_back(n.id);
  }

  static std::string make() {
    std::string h = "<h1>T</h1><h2>Solution</h2><div>";
    for (int i = 0; i < 20; ++i) h += "<p>" + std::string(5, char('a' + i)) + "</p>";
    return h + "</div>";
  }

  // Paragraphs first..last, 1-based.
  StepSet set(int first, int last, StepGenerator g = StepGenerator::NumberedParagraphs) const {
    StepSet s;
    s.generator = g;
    for (int i = first; i <= last; i += 2) s.anchors.push_back(ps[i - 1]);
    s.common_ancestor = nth_tag(page.doc, "div", 0).id;
    s.extent_last = page.doc.nodes[ps[last - 1]].last;
    s.extent = text_hull(page.doc, Region{ps[first - 1], s.extent_last, 0});
    return s;
  }
};

}  // namespace

TEST(SelectParentStepset, EarlierPositionBeatsHigherCoverage) {
  Paragraphs f;
  const auto a = f.set(1, 16);  // 80 of 100
  const auto b = f.set(2, 19);  // 90 of 95 once the 5-char preamble is set aside
  const auto body = f.page.solution().body(f.page.doc);
  EXPECT_NEAR(coverage(a, body, f.page.doc), 0.8, 1e-12);
  EXPECT_NEAR(coverage(b, body, f.page.doc), 90.0 / 95.0, 1e-12);
  EXPECT_EQ(select_parent_stepset({b, a}, body, f.page.doc), a);
  EXPECT_EQ(testing_support::oracle_select({b, a}, body, f.page.doc), a);
}

TEST(SelectParentStepset, ThresholdAndTies) {
  Paragraphs f;
  const auto body = f.page.solution().body(f.page.doc);
  EXPECT_EQ(select_parent_stepset({f.set(1, 18)}, body, f.page.doc), f.set(1, 18));
  EXPECT_FALSE(select_parent_stepset({f.set(1, 10), f.set(3, 14)}, body, f.page.doc));
  // Same start: the higher coverage wins, then the generator order.
  EXPECT_EQ(select_parent_stepset({f.set(1, 16), f.set(1, 20)}, body, f.page.doc), f.set(1, 20));
  const auto x = f.set(1, 20, StepGenerator::StepHeadings);
  const auto y = f.set(1, 20, StepGenerator::NumberedParagraphs);
  EXPECT_EQ(select_parent_stepset({x, y}, body, f.page.doc), y);
  EXPECT_FALSE(select_parent_stepset({}, body, f.page.doc));
}

// Exhaustive check over every contiguous carve-out of the paragraphs,
// taken in pairs and triples.
TEST(SelectParentStepset, AgreesWithOracleOnCarveOuts) {
  Paragraphs f;
  const auto body = f.page.solution().body(f.page.doc);
  std::vector<StepSet> all;
  for (int a = 1; a <= 20; a += 3)
    for (int b = a + 1; b <= 20; b += 2)
      for (auto g : {StepGenerator::OrderedList, StepGenerator::StepHeadings}) all.push_back(f.set(a, b, g));
  for (const auto& s : all)
    ASSERT_NEAR(coverage(s, body, f.page.doc), testing_support::oracle_coverage(s, body, f.page.doc), 1e-12);
  std::mt19937 rng(5);
  for (int i = 0; i < 3000; ++i) {
    std::vector<StepSet> cands;
    const int n = std::uniform_int_distribution<>(0, 4)(rng);
    for (int k = 0; k < n; ++k) cands.push_back(all[rng() % all.size()]);
    for (double thr : {0.5, 0.75, 0.9})
      ASSERT_EQ(select_parent_stepset(cands, body, f.page.doc, thr),
                testing_support::oracle_select(cands, body, f.page.doc, thr));
  }
}

TEST(ExtractSteps, SingleBlockItemsHaveNoTitle) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>Download the fix</li><li>Install it</li></ol>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  const auto raw = extract_steps(sets.at(0), p.doc, test_meta());
  ASSERT_EQ(raw.size(), 2u);
  EXPECT_EQ(raw[0].title, "");
  EXPECT_EQ(raw[1].title, "");
  EXPECT_EQ(texts(blockify(raw[0].content, p.doc)), std::vector<std::string>{"Download the fix"});
  EXPECT_EQ(texts(blockify(raw[1].content, p.doc)), std::vector<std::string>{"Install it"});
}

TEST(ExtractSteps, BoldLeadTitleAndContent) {
  Page p("<h1>T</h1><h2>Solution</h2><p><b>Step 1: Backup</b></p><p>Stop the instance.</p>"
         "<p>Run the backup.</p><p><b>Step 2: Restore</b></p><p>Run the restore.</p>");
  const auto sets = find_step_sets(p.solution(), p.doc, test_meta());
  ASSERT_EQ(sets.size(), 1u);
  const auto raw = extract_steps(sets[0], p.doc, test_meta());
  ASSERT_EQ(raw.size(), 2u);
  EXPECT_EQ(raw[0].title, "Backup");
  EXPECT_EQ(texts(blockify(raw[0].content, p.doc)),
            (std::vector<std::string>{"Stop the instance.", "Run the backup."}));
  EXPECT_EQ(raw[1].title, "Restore");
}

TEST(ExtractSteps, NumberingStripped) {
  Page p("<h1>T</h1><h2>Solution</h2><p>1) Unzip the file</p><p>2) Run setup</p>");
  const auto ps = p.procedures();
  ASSERT_EQ(ps.size(), 1u);
  ASSERT_EQ(ps[0].steps.size(), 2u);
  EXPECT_EQ(ps[0].steps[1].title, "Run setup");
  EXPECT_EQ(p.doc.slice(ps[0].steps[1].title_span), "2) Run setup");
}

TEST(ExtractSteps, AnchorOutsideAncestorIsNavigationError) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>a</li><li>b</li></ol><p>c</p>");
  auto s = find_step_sets(p.solution(), p.doc, test_meta()).at(0);
  s.anchors.push_back(nth_tag(p.doc, "p", 0).id);
  EXPECT_THROW(extract_steps(s, p.doc, test_meta()), NavigationError);
}

TEST(ClassifyStepType, Examples) {
  EntityLinker linker(test_meta());
  EXPECT_EQ(classify_step_type("If you are using DB2 v11", "", test_meta(), &linker), StepType::Conditional);
  EXPECT_EQ(classify_step_type("Restart the server", "", test_meta(), &linker), StepType::Sequential);
  EXPECT_EQ(classify_step_type("On AIX platforms", "", test_meta(), &linker), StepType::Conditional);
  EXPECT_EQ(classify_step_type("On the server", "", test_meta(), &linker), StepType::Sequential);
  EXPECT_EQ(classify_step_type("", "When the load ends, stop.", test_meta(), &linker), StepType::Conditional);
  EXPECT_EQ(classify_step_type("Unless told otherwise, wait", "", test_meta(), &linker), StepType::Conditional);
  EXPECT_EQ(classify_step_type("Iffy results", "", test_meta(), &linker), StepType::Sequential);
}

TEST(ClassifyContent, Examples) {
  const auto d = parse_html(
      "<p><img src=\"x.png\" alt=\"diagram\"></p><pre>db2 get db cfg</pre><p>Note: requires restart</p>"
      "<p>plain</p><ul><li>a</li></ul><table><tr><td>t</td></tr></table>"
      "<p><a href=\"https://e.com\">docs</a></p><p style=\"font-family: monospace\">ls</p>"
      "<p>Warning: slow</p>");
  const auto img = classify_content(nth_tag(d, "img", 0).id, d);
  EXPECT_EQ(img.kind, ContentKind::Image);
  EXPECT_EQ(img.attrs.at("source"), "x.png");
  const auto pre = classify_content(nth_tag(d, "pre", 0).id, d);
  EXPECT_EQ(pre.kind, ContentKind::Code);
  EXPECT_EQ(pre.text, "db2 get db cfg");
  EXPECT_EQ(classify_content(nth_tag(d, "p", 1).id, d).kind, ContentKind::Note);
  EXPECT_EQ(classify_content(nth_tag(d, "p", 2).id, d).kind, ContentKind::Paragraph);
  EXPECT_EQ(classify_content(nth_tag(d, "ul", 0).id, d).kind, ContentKind::PlainList);
  EXPECT_EQ(classify_content(nth_tag(d, "table", 0).id, d).kind, ContentKind::Table);
  const auto link = classify_content(nth_tag(d, "p", 3).id, d);
  EXPECT_EQ(link.kind, ContentKind::Hyperlink);
  EXPECT_EQ(link.attrs.at("target"), "https://e.com");
  EXPECT_EQ(classify_content(nth_tag(d, "p", 4).id, d).kind, ContentKind::Code);
  EXPECT_EQ(classify_content(nth_tag(d, "p", 5).id, d).kind, ContentKind::Note);
  EXPECT_THROW(classify_content(100000, d), UnknownNode);
}

TEST(ExtractProcedure, BaseCase) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>Stop it.</li><li>Start it.</li></ol>");
  const auto ps = p.procedures();
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].depth, 0);
  ASSERT_EQ(ps[0].steps.size(), 2u);
  for (const auto& s : ps[0].steps) EXPECT_EQ(s.step_type, StepType::Sequential);
  EXPECT_EQ(ps[0].steps[0].index, 1);
  EXPECT_EQ(ps[0].steps[1].index, 2);
  EXPECT_EQ(ps[0].source_section, SectionType::Solution);
}

TEST(ExtractProcedure, TwoLevels) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li><p>Prepare.</p><ol><li>Stop it.</li><li>Back it up.</li>"
         "</ol></li><li>Upgrade.</li></ol>");
  const auto ps = p.procedures();
  ASSERT_EQ(ps.size(), 1u);
  ASSERT_EQ(ps[0].steps.size(), 2u);
  ASSERT_EQ(ps[0].steps[0].nested.size(), 1u);
  EXPECT_EQ(ps[0].steps[0].nested[0].depth, 1);
  EXPECT_EQ(ps[0].steps[0].nested[0].steps.size(), 2u);
  EXPECT_EQ(ps[0].steps[0].title, "Prepare");
  EXPECT_TRUE(ps[0].steps[0].content.empty());
  EXPECT_TRUE(ps[0].steps[1].nested.empty());
}

TEST(ExtractProcedure, TwoListsSeparatedByParagraph) {
  const auto p = Page(testing_support::read_file(testing_support::fixtures() / "corpus/09_two_procedures.html"));
  const auto ps = p.procedures();
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].steps.size(), 4u);
  EXPECT_EQ(ps[1].steps.size(), 2u);
  EXPECT_LT(ps[0].span.end, ps[1].span.start);
  EXPECT_EQ(texts(ps[1].preamble), std::vector<std::string>{"Then:"});
  EXPECT_TRUE(ps[0].postamble.empty());
}

// Neither list reaches the threshold on its own, so nothing is selected.
TEST(ExtractProcedure, EqualListsFallShortOfThreshold) {
  Page p("<h1>T</h1><h2>Solution</h2><ol><li>Run db2support.</li><li>Upload the archive.</li></ol>"
         "<p>Then collect the operating system data.</p>"
         "<ol><li>Run the snap command.</li><li>Upload the snap file.</li></ol>");
  EXPECT_TRUE(p.procedures().empty());
}

TEST(ExtractProcedure, NestingFixtures) {
  const Page two(testing_support::read_file(testing_support::fixtures() / "corpus/07_nested_2level.html"));
  EXPECT_EQ(tree_levels(two.procedures()), 2);
  EXPECT_EQ(flat_steps(two.procedures()), 7u);
  const Page three(testing_support::read_file(testing_support::fixtures() / "corpus/08_nested_3level.html"));
  EXPECT_EQ(tree_levels(three.procedures()), 3);
  EXPECT_EQ(flat_steps(three.procedures()), 7u);
}

TEST(ExtractProcedure, DepthCap) {
  std::string inner = "<li>leaf a</li><li>leaf b</li>";
  for (int i = 0; i < 11; ++i) inner = "<li>x" + std::to_string(i) + "<ol>" + inner + "</ol></li><li>y</li>";
  Page p("<h1>T</h1><h2>Solution</h2><ol>" + inner + "</ol>");
  std::vector<Diagnostic> diags;
  const auto ps = p.procedures({}, &diags);
  EXPECT_EQ(tree_levels(ps), 9);
  ASSERT_FALSE(diags.empty());
  EXPECT_EQ(diags[0].rule, "DepthExceeded");
  ExtractionOptions shallow;
  shallow.max_depth = 2;
  diags.clear();
  EXPECT_EQ(tree_levels(p.procedures(shallow, &diags)), 3);
  EXPECT_FALSE(diags.empty());
  // Capped content stays in place as blocks.
  const auto conserved = testing_support::check_partition(
      p.doc, p.outline,
      {SectionContent{p.procedures(shallow), {}}});
  EXPECT_TRUE(conserved.empty()) << conserved.front();
}

TEST(ExtractProcedure, SingleItemListIsPlainContent) {
  Page p(testing_support::read_file(testing_support::fixtures() / "corpus/19_single_item_list.html"));
  EXPECT_TRUE(p.procedures().empty());
}

TEST(ExtractProcedure, NonProceduralSectionsKeepBlocks) {
  Page p("<h1>T</h1><h2>Symptom</h2><ol><li>a</li><li>b</li></ol><h2>Solution</h2><p>x</p>");
  BaselineAnnotator annotator(test_meta().condition_markers);
  ExtractionContext ctx{test_meta(), nullptr, &annotator, {}, nullptr};
  const auto sym = extract_section_content(p.section(SectionType::Symptom), p.doc, ctx);
  EXPECT_TRUE(sym.procedures.empty());
  ASSERT_EQ(sym.blocks.size(), 1u);
  EXPECT_EQ(sym.blocks[0].kind, ContentKind::PlainList);
  EXPECT_FALSE(extract_procedure(p.section(SectionType::Symptom), p.doc, ctx, 0, true).empty());
  EXPECT_TRUE(is_procedural_section(SectionType::DiagnosticSteps));
  EXPECT_TRUE(is_procedural_section(SectionType::Answer));
  EXPECT_FALSE(is_procedural_section(SectionType::Constraints));
}

TEST(LeadingSentence, Terminators) {
  EXPECT_EQ(leading_sentence("Stop it. Then go."), (std::pair<std::size_t, std::size_t>{7, 9}));
  EXPECT_EQ(leading_sentence("Run db2.exe now"), (std::pair<std::size_t, std::size_t>{15, 15}));
  EXPECT_EQ(leading_sentence("Backup:"), (std::pair<std::size_t, std::size_t>{6, 7}));
}
