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

#include "micrograph/procedure_extractor.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_set>

#include "micrograph/error.hpp"

namespace micrograph {
namespace {

constexpr std::size_t kTitleCap = 120;

bool has_bold_ancestor(const DomDocument& doc, NodeId id, NodeId stop) {
  for (auto p = doc.nodes[id].parent; p && *p != stop; p = doc.nodes[*p].parent) {
    const auto& n = doc.nodes[*p];
    if (n.is("b") || n.is("strong")) return true;
  }
  return false;
}

bool has_block_descendant(const DomDocument& doc, NodeId id) {
  const auto& n = doc.nodes[id];
  for (NodeId k = id + 1; k <= n.last; ++k) {
    const auto& d = doc.nodes[k];
    if (d.is_element() && d.tag != "br" && (is_block_tag(d.tag) || d.tag == "img")) return true;
  }
  return false;
}

// p, or a div holding inline content only.
bool is_paragraph_like(const DomDocument& doc, NodeId id) {
  const auto& n = doc.nodes[id];
  if (n.is("p")) return true;
  return n.is("div") && !has_block_descendant(doc, id);
}

// First Text node under `id`, if any.
std::optional<NodeId> first_text(const DomDocument& doc, NodeId id) {
  const auto& n = doc.nodes[id];
  for (NodeId k = id; k <= n.last; ++k) {
    if (doc.nodes[k].is_text()) return k;
  }
  return std::nullopt;
}

// First b/strong element under `id` that contains text.
std::optional<NodeId> first_bold(const DomDocument& doc, NodeId id) {
  const auto& n = doc.nodes[id];
  for (NodeId k = id + 1; k <= n.last; ++k) {
    const auto& d = doc.nodes[k];
    if ((d.is("b") || d.is("strong")) && !d.span.empty()) return k;
  }
  return std::nullopt;
}

// Paragraph whose text opens with bold, e.g. "<p><b>Step 2:</b> Restore</p>".
bool is_bold_lead(const DomDocument& doc, NodeId id) {
  if (!is_paragraph_like(doc, id)) return false;
  auto t = first_text(doc, id);
  return t && has_bold_ancestor(doc, *t, id);
}

bool is_step_anchor(const DomDocument& doc, NodeId id, const CorpusMeta& meta) {
  if (is_step_heading(doc, id, meta)) return true;
  const auto& n = doc.nodes[id];
  return is_bold_lead(doc, id) && match_step_cue(doc.slice(n.span), meta).has_value();
}

bool anchor_allowed(const DomDocument& doc, const Region& r, NodeId id) {
  const auto& n = doc.nodes[id];
  return r.contains(id) && n.span.start >= r.window_start;
}

bool subtree_in(const DomDocument& doc, const Region& r, NodeId id) {
  return r.contains(id) && doc.nodes[id].last <= r.last &&
         doc.nodes[id].span.start >= r.window_start;
}

StepSet make_stepset(const DomDocument& doc, const Region& r, StepGenerator g,
                     std::vector<NodeId> anchors, NodeId ancestor) {
  StepSet s;
  s.generator = g;
  s.anchors = std::move(anchors);
  s.common_ancestor = ancestor;
  s.extent_last = std::min(doc.nodes[ancestor].last, r.last);
  const auto start = doc.nodes[s.anchors.front()].span.start;
  const auto hull = text_hull(doc, Region{s.anchors.front(), s.extent_last, r.window_start});
  s.extent = Span{start, hull.empty() ? start : std::max(start, hull.end)};
  return s;
}

// Groups numbered siblings into maximal runs that count up by one. Other
// siblings may sit between members of a run.
void numbered_runs(const DomDocument& doc, const Region& r, StepGenerator g,
                   const std::vector<std::pair<NodeId, int>>& numbered,
                   const std::function<NodeId(NodeId)>& group_of,
                   std::vector<StepSet>& out) {
  std::map<NodeId, std::vector<std::pair<NodeId, int>>> groups;
  for (const auto& item : numbered) groups[group_of(item.first)].push_back(item);
  for (const auto& [parent, items] : groups) {
    std::vector<NodeId> run;
    int last = 0;
    auto flush = [&] {
      if (run.size() >= 2) out.push_back(make_stepset(doc, r, g, run, parent));
      run.clear();
    };
    for (const auto& [id, number] : items) {
      if (!run.empty() && number == last + 1) {
        run.push_back(id);
      } else {
        flush();
        run.push_back(id);
      }
      last = number;
    }
    flush();
  }
}

bool is_list_tag(std::string_view tag) {
  return tag == "ul" || tag == "ol" || tag == "dl" || tag == "menu" || tag == "dir";
}

bool is_code_tag(std::string_view tag) {
  return tag == "pre" || tag == "code" || tag == "tt" || tag == "kbd" || tag == "samp";
}

bool is_monospace_styled(const DomNode& n) {
  if (auto style = n.attr("style")) {
    const auto lower = text::to_lower(*style);
    if (lower.find("monospace") != std::string::npos ||
        lower.find("courier") != std::string::npos)
      return true;
  }
  if (auto cls = n.attr("class")) {
    const auto lower = text::to_lower(*cls);
    if (lower.find("code") != std::string::npos) return true;
  }
  return false;
}

bool has_note_prefix(std::string_view text) {
  for (std::string_view p : {"note:", "warning:", "important:"}) {
    if (text::istarts_with(text, p)) return true;
  }
  return false;
}

// The single element under `id` whose text is all of id's text, searched
// through single-child chains: <p><a>..</a></p> resolves to the a.
std::optional<NodeId> sole_text_carrier(const DomDocument& doc, NodeId id, std::string_view tag) {
  const auto& n = doc.nodes[id];
  for (NodeId k = id + 1; k <= n.last; ++k) {
    const auto& d = doc.nodes[k];
    if (d.is(tag) && d.span == n.span && !n.span.empty()) {
      // All Text nodes of `n` must fall inside d.
      bool all = true;
      for (NodeId t = id + 1; t <= n.last && all; ++t) {
        if (doc.nodes[t].is_text() && !(k < t && t <= d.last)) all = false;
      }
      if (all) return k;
    }
  }
  return std::nullopt;
}

ContentKind kind_of(const DomDocument& doc, NodeId id, std::map<std::string, std::string>& attrs) {
  const auto& n = doc.nodes[id];
  if (n.is_text()) return has_note_prefix(n.text) ? ContentKind::Note : ContentKind::Paragraph;
  if (n.tag == "img") {
    attrs["source"] = std::string(n.attr("src").value_or(""));
    if (auto alt = n.attr("alt")) attrs["alt"] = std::string(*alt);
    return ContentKind::Image;
  }
  if (is_code_tag(n.tag) || is_monospace_styled(n)) return ContentKind::Code;
  if (n.tag == "table") return ContentKind::Table;
  if (is_list_tag(n.tag)) return ContentKind::PlainList;
  if (n.tag == "a") {
    attrs["target"] = std::string(n.attr("href").value_or(""));
    return ContentKind::Hyperlink;
  }
  if (auto a = sole_text_carrier(doc, id, "a")) {
    attrs["target"] = std::string(doc.nodes[*a].attr("href").value_or(""));
    return ContentKind::Hyperlink;
  }
  for (std::string_view tag : {"pre", "code", "tt", "kbd", "samp"}) {
    if (sole_text_carrier(doc, id, tag)) return ContentKind::Code;
  }
  if (has_note_prefix(doc.slice(n.span))) return ContentKind::Note;
  return ContentKind::Paragraph;
}

class Blockifier {
 public:
  Blockifier(const DomDocument& doc, std::vector<ContentBlock>& out) : doc_(doc), out_(out) {}

  void run(const Region& r) {
    if (r.empty()) return;
    std::vector<NodeId> inline_run;
    auto flush = [&] {
      if (!inline_run.empty()) emit_run(inline_run, r.window_start);
      inline_run.clear();
    };
    for (NodeId id : top_level_nodes(doc_, r)) {
      const auto& n = doc_.nodes[id];
      if (!inline_run.empty() && doc_.nodes[inline_run.back()].parent != n.parent) flush();
      const bool inline_node =
          n.is_text() || (!is_block_tag(n.tag) && n.tag != "img" && !has_block_descendant(doc_, id));
      if (inline_node) {
        inline_run.push_back(id);
        continue;
      }
      flush();
      block(id, r.window_start);
    }
    flush();
  }

 private:
  void block(NodeId id, std::size_t window) {
    const auto& n = doc_.nodes[id];
    if (n.tag == "br" || n.tag == "hr") return;
    if (n.tag == "img") {
      ContentBlock b;
      b.kind = kind_of(doc_, id, b.attrs);
      b.span = Span{std::max(n.span.start, window), std::max(n.span.start, window)};
      b.node = id;
      out_.push_back(std::move(b));
      return;
    }
    const bool whole = n.tag == "table" || n.tag == "pre" || is_list_tag(n.tag) ||
                       is_code_tag(n.tag) || !has_block_descendant(doc_, id);
    if (!whole) {
      run(Region{id + 1, n.last, window});
      return;
    }
    emit(id, Region{id, n.last, window}, true);
  }

  void emit_run(const std::vector<NodeId>& ids, std::size_t window) {
    Region r{ids.front(), doc_.nodes[ids.back()].last, window};
    emit(ids.front(), r, ids.size() == 1);
  }

  void emit(NodeId node, const Region& r, bool single) {
    const auto hull = text_hull(doc_, r);
    if (hull.empty()) return;
    ContentBlock b;
    b.node = node;
    b.span = hull;
    b.text = std::string(doc_.slice(hull));
    b.kind = single ? kind_of(doc_, node, b.attrs) : ContentKind::Paragraph;
    // Re-check the prefix rule on the visible text; a window may cut it off.
    if (b.kind == ContentKind::Paragraph || b.kind == ContentKind::Note)
      b.kind = has_note_prefix(b.text) ? ContentKind::Note : ContentKind::Paragraph;
    out_.push_back(std::move(b));
  }

  const DomDocument& doc_;
  std::vector<ContentBlock>& out_;
};

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && text::is_space(s[i])) ++i;
  return i;
}

// Cuts at most kTitleCap bytes, backing off to a word boundary.
std::size_t cap_title(std::string_view s) {
  if (s.size() <= kTitleCap) return s.size();
  std::size_t cut = text::utf8_floor(s, kTitleCap);
  const auto space = s.substr(0, cut).rfind(' ');
  if (space != std::string_view::npos && space > 0) cut = space;
  return cut;
}

struct TitleCut {
  std::size_t text_start = 0;  // offsets relative to the scanned string
  std::size_t text_end = 0;
  std::size_t span_end = 0;
};

// Title from `from` up to a terminator (`:` or `.` before a space or the
// end) or `limit`, whichever comes first, capped.
TitleCut cut_title(std::string_view s, std::size_t from, std::size_t limit) {
  TitleCut c;
  c.text_start = skip_spaces(s, from);
  if (c.text_start >= limit) {
    c.text_start = c.text_end = c.span_end = std::max(from, std::min(c.text_start, limit));
    return c;
  }
  const auto body = s.substr(c.text_start, limit - c.text_start);
  std::size_t end = body.size();
  bool terminated = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char ch = body[i];
    if ((ch == ':' || ch == '.') &&
        (i + 1 == body.size() || text::is_space(body[i + 1]))) {
      end = i;
      terminated = true;
      break;
    }
  }
  const auto capped = cap_title(body.substr(0, end));
  if (capped < end) terminated = false;
  end = capped;
  std::size_t text_end = end;
  while (text_end > 0 && text::is_space(body[text_end - 1])) --text_end;
  c.text_end = c.text_start + text_end;
  std::size_t span_end = c.text_start + end + (terminated ? 1 : 0);
  c.span_end = skip_spaces(s, span_end);
  return c;
}

std::string_view first_sentence_of(const std::vector<ContentBlock>& blocks) {
  for (const auto& b : blocks) {
    if (b.kind == ContentKind::Paragraph || b.kind == ContentKind::Note) {
      std::string_view t = b.text;
      return t.substr(0, leading_sentence(t).first);
    }
  }
  return {};
}

bool starts_with_marker(std::string_view text, const std::vector<std::string>& markers) {
  for (const auto& m : markers) {
    if (m.empty() || !text::istarts_with(text, m)) continue;
    if (text.size() == m.size() || !text::is_word_char(text[m.size()])) return true;
  }
  return false;
}

struct RegionResult {
  std::vector<Procedure> procedures;
  std::vector<ContentBlock> blocks;
};

class Extractor {
 public:
  Extractor(const DomDocument& doc, const ExtractionContext& ctx, const Section& section)
      : doc_(doc), ctx_(ctx), section_(section) {}

  RegionResult extract(const Region& region, int depth) {
    RegionResult result;
    if (region.empty()) return result;
    auto candidates = find_step_sets(region, doc_, ctx_.meta);
    if (depth > ctx_.options.max_depth) {
      if (!candidates.empty() && ctx_.diagnostics) {
        ctx_.diagnostics->push_back(
            {"DepthExceeded", "nesting deeper than " + std::to_string(ctx_.options.max_depth) +
                                  " kept as content in section " +
                                  std::to_string(section_.order)});
      }
      result.blocks = blockify(region, doc_);
      return result;
    }
    auto parent = select_parent_stepset(candidates, region, doc_,
                                        ctx_.options.coverage_threshold,
                                        ctx_.options.preamble_ratio);
    if (!parent) {
      result.blocks = blockify(region, doc_);
      return result;
    }

    Procedure proc;
    proc.source_section = section_.section_type;
    proc.source_order = section_.order;
    proc.generator = parent->generator;
    proc.depth = depth;
    proc.span = parent->extent;
    proc.preamble =
        blockify(Region{region.first, parent->anchors.front() - 1, region.window_start}, doc_);

    int index = 0;
    for (auto& raw : extract_steps(*parent, doc_, ctx_.meta)) {
      Step step;
      step.index = ++index;
      step.title = raw.title;
      step.title_span = raw.title_span;
      step.span = raw.span;
      step.anchor = raw.anchor;
      auto sub = extract(raw.content, depth + 1);
      step.content = std::move(sub.blocks);
      step.nested = std::move(sub.procedures);

      std::string_view first_sentence = first_sentence_of(step.content);
      if (first_sentence.empty() && !step.nested.empty())
        first_sentence = first_sentence_of(step.nested.front().preamble);
      step.step_type = classify_step_type(step.title, first_sentence, ctx_.meta, ctx_.linker);
      step.conditionals = conditionals_of(step, raw.title_text_start);
      proc.steps.push_back(std::move(step));
    }

    Region post{parent->extent_last + 1, region.last, region.window_start};
    auto rest = extract(post, depth);
    result.procedures.push_back(std::move(proc));
    if (rest.procedures.empty()) {
      result.procedures.back().postamble = std::move(rest.blocks);
    } else {
      for (auto& p : rest.procedures) result.procedures.push_back(std::move(p));
    }
    return result;
  }

 private:
  std::vector<ConditionalBlock> conditionals_of(const Step& step, std::size_t title_start) const {
    std::vector<ConditionalBlock> out;
    if (!ctx_.annotator) return out;
    auto run = [&](std::string_view text, std::size_t base) {
      if (text.empty()) return;
      for (auto c : extract_conditionals(text, ctx_.annotator->annotate(text), ctx_.meta)) {
        c.condition_span = Span{c.condition_span.start + base, c.condition_span.end + base};
        c.effect_span = Span{c.effect_span.start + base, c.effect_span.end + base};
        out.push_back(std::move(c));
      }
    };
    auto run_blocks = [&](const std::vector<ContentBlock>& blocks) {
      for (const auto& b : blocks) {
        if (b.kind == ContentKind::Paragraph || b.kind == ContentKind::Note ||
            b.kind == ContentKind::PlainList)
          run(b.text, b.span.start);
      }
    };
    run(step.title, title_start);
    run_blocks(step.content);
    for (const auto& p : step.nested) {
      run_blocks(p.preamble);
      run_blocks(p.postamble);
    }
    return out;
  }

  const DomDocument& doc_;
  const ExtractionContext& ctx_;
  const Section& section_;
};

}  // namespace

std::string_view to_string(StepGenerator g) {
  switch (g) {
    case StepGenerator::OrderedList: return "OrderedList";
    case StepGenerator::NumberedParagraphs: return "NumberedParagraphs";
    case StepGenerator::StepHeadings: return "StepHeadings";
    case StepGenerator::NumberedTableRows: return "NumberedTableRows";
    case StepGenerator::LeadNumberedListItems: return "LeadNumberedListItems";
  }
  return "OrderedList";
}

std::string_view to_string(StepType t) {
  return t == StepType::Conditional ? "Conditional" : "Sequential";
}

std::string_view to_string(ContentKind k) {
  switch (k) {
    case ContentKind::Paragraph: return "Paragraph";
    case ContentKind::Code: return "Code";
    case ContentKind::Image: return "Image";
    case ContentKind::Table: return "Table";
    case ContentKind::Hyperlink: return "Hyperlink";
    case ContentKind::PlainList: return "PlainList";
    case ContentKind::Note: return "Note";
  }
  return "Paragraph";
}

bool operator==(const Step& a, const Step& b) {
  return std::tie(a.index, a.title, a.title_span, a.step_type, a.content, a.nested,
                  a.conditionals, a.span, a.anchor) ==
         std::tie(b.index, b.title, b.title_span, b.step_type, b.content, b.nested,
                  b.conditionals, b.span, b.anchor);
}

std::optional<int> parse_numbering(std::string_view s, std::size_t* len) {
  std::size_t i = 0;
  const bool paren = !s.empty() && s[0] == '(';
  if (paren) ++i;
  const std::size_t digits_start = i;
  while (i < s.size() && i - digits_start < 6 && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == digits_start || i >= s.size()) return std::nullopt;
  if (s[i] >= '0' && s[i] <= '9') return std::nullopt;
  if (paren ? s[i] != ')' : (s[i] != '.' && s[i] != ')')) return std::nullopt;
  ++i;
  if (i < s.size() && !text::is_space(s[i])) return std::nullopt;
  if (len) *len = i;
  return std::stoi(std::string(s.substr(digits_start, i - 1 - digits_start)));
}

std::pair<std::size_t, std::size_t> leading_sentence(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if ((c == '.' || c == ':' || c == '!' || c == '?') &&
        (i + 1 == s.size() || text::is_space(s[i + 1]))) {
      std::size_t end = i;
      while (end > 0 && text::is_space(s[end - 1])) --end;
      return {end, skip_spaces(s, i + 1)};
    }
  }
  return {s.size(), s.size()};
}

std::vector<StepSet> find_step_sets(const Region& r, const DomDocument& doc,
                                    const CorpusMeta& meta) {
  std::vector<StepSet> out;
  if (r.empty()) return out;
  std::vector<std::pair<NodeId, int>> paragraphs, step_leads, rows;
  auto parent_of = [&](NodeId id) { return doc.nodes[id].parent.value_or(doc.root); };

  for (NodeId id = r.first; id <= r.last && id < doc.nodes.size(); ++id) {
    const auto& n = doc.nodes[id];
    if (!n.is_element()) continue;

    if ((n.is("ol") || n.is("ul")) && subtree_in(doc, r, id)) {
      std::vector<NodeId> items;
      bool all_numbered = true;
      for (auto c : n.children) {
        if (!doc.nodes[c].is("li")) continue;
        items.push_back(c);
        if (!parse_numbering(doc.slice(doc.nodes[c].span))) all_numbered = false;
      }
      if (items.size() >= 2) {
        if (n.is("ol")) {
          out.push_back(make_stepset(doc, r, StepGenerator::OrderedList, items, id));
        } else if (all_numbered) {
          out.push_back(make_stepset(doc, r, StepGenerator::LeadNumberedListItems, items, id));
        }
      }
    }

    if (n.is("table") && subtree_in(doc, r, id)) {
      std::vector<std::pair<NodeId, int>> numbered;
      for (NodeId k = id + 1; k <= n.last; ++k) {
        const auto& tr = doc.nodes[k];
        if (!tr.is("tr")) continue;
        // Rows of nested tables belong to those tables.
        auto p = tr.parent;
        while (p && !doc.nodes[*p].is("table")) p = doc.nodes[*p].parent;
        if (!p || *p != id) continue;
        std::optional<NodeId> cell;
        for (auto c : tr.children) {
          if (doc.nodes[c].is("td") || doc.nodes[c].is("th")) {
            cell = c;
            break;
          }
        }
        if (!cell) continue;
        auto t = doc.slice(doc.nodes[*cell].span);
        if (!t.empty() && t.back() == '.') t.remove_suffix(1);
        if (t.empty() || t.size() > 6 ||
            !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
          continue;
        numbered.emplace_back(k, std::stoi(std::string(t)));
      }
      numbered_runs(doc, r, StepGenerator::NumberedTableRows, numbered,
                    [&](NodeId) { return id; }, out);
    }

    if (n.span.empty() || !anchor_allowed(doc, r, id)) continue;
    const auto t = doc.slice(n.span);
    if (is_paragraph_like(doc, id)) {
      if (auto num = parse_numbering(t)) paragraphs.emplace_back(id, *num);
    }
    if (is_step_anchor(doc, id, meta)) {
      if (auto num = match_step_cue(t, meta)) step_leads.emplace_back(id, *num);
    }
  }
  numbered_runs(doc, r, StepGenerator::NumberedParagraphs, paragraphs, parent_of, out);
  numbered_runs(doc, r, StepGenerator::StepHeadings, step_leads, parent_of, out);

  std::stable_sort(out.begin(), out.end(), [](const StepSet& a, const StepSet& b) {
    return std::tie(a.extent.start, a.generator, a.anchors.front()) <
           std::tie(b.extent.start, b.generator, b.anchors.front());
  });
  return out;
}

std::vector<StepSet> find_step_sets(const Section& section, const DomDocument& doc,
                                    const CorpusMeta& meta) {
  return find_step_sets(section.body(doc), doc, meta);
}

double coverage(const StepSet& s, const Region& r, const DomDocument& doc, double ratio) {
  const auto body = text_chars(doc, r);
  if (body == 0 || s.anchors.empty()) return 0.0;
  const auto inside = text_chars(
      doc, Region{std::max(s.anchors.front(), r.first), std::min(s.extent_last, r.last),
                  r.window_start});
  const auto pre = text_chars(doc, Region{r.first, s.anchors.front() - 1, r.window_start});
  const double denom = static_cast<double>(pre) <= ratio * static_cast<double>(body)
                           ? static_cast<double>(body - pre)
                           : static_cast<double>(body);
  if (denom <= 0.0) return 0.0;
  return std::min(1.0, static_cast<double>(inside) / denom);
}

double coverage(const StepSet& s, const Section& section, const DomDocument& doc, double ratio) {
  return coverage(s, section.body(doc), doc, ratio);
}

std::optional<StepSet> select_parent_stepset(const std::vector<StepSet>& candidates,
                                             const Region& r, const DomDocument& doc,
                                             double threshold, double ratio) {
  const StepSet* best = nullptr;
  double best_cov = 0.0;
  for (const auto& c : candidates) {
    if (c.anchors.empty()) continue;
    const double cov = coverage(c, r, doc, ratio);
    if (cov < threshold) continue;
    if (!best) {
      best = &c;
      best_cov = cov;
      continue;
    }
    const auto key = [&](const StepSet& s, double v) {
      return std::make_tuple(s.anchors.front(), -v, doc.nodes[s.common_ancestor].depth,
                             static_cast<int>(s.generator));
    };
    if (key(c, cov) < key(*best, best_cov)) {
      best = &c;
      best_cov = cov;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<StepSet> select_parent_stepset(const std::vector<StepSet>& candidates,
                                             const Section& section, const DomDocument& doc,
                                             double threshold, double ratio) {
  return select_parent_stepset(candidates, section.body(doc), doc, threshold, ratio);
}

std::vector<RawStep> extract_steps(const StepSet& s, const DomDocument& doc,
                                   const CorpusMeta& meta) {
  std::vector<RawStep> steps;
  for (std::size_t i = 0; i < s.anchors.size(); ++i) {
    const NodeId anchor = s.anchors[i];
    if (!doc.contains(anchor) || !doc.is_ancestor(s.common_ancestor, anchor))
      throw NavigationError("anchor " + std::to_string(anchor) + " is not inside node " +
                            std::to_string(s.common_ancestor));
    const NodeId last = i + 1 < s.anchors.size() ? s.anchors[i + 1] - 1 : s.extent_last;
    const auto& a = doc.nodes[anchor];
    const auto text = doc.slice(a.span);

    RawStep step;
    step.anchor = anchor;
    const auto hull = text_hull(doc, Region{anchor, last, a.span.start});
    step.span = Span{a.span.start, hull.empty() ? a.span.start : hull.end};

    std::size_t title_end = a.span.start;
    switch (s.generator) {
      case StepGenerator::StepHeadings:
      case StepGenerator::NumberedParagraphs: {
        std::size_t token = 0;
        std::size_t limit = text.size();
        if (s.generator == StepGenerator::StepHeadings) {
          match_step_cue(text, meta, &token);
          while (token < text.size() &&
                 (text::is_space(text[token]) || text[token] == ':' || text[token] == '.' ||
                  text[token] == ')' || text[token] == '-'))
            ++token;
          if (!is_heading_tag(a.tag) && !is_bold_only(doc, anchor)) {
            if (auto b = first_bold(doc, anchor)) {
              const auto bold_end = doc.nodes[*b].span.end - a.span.start;
              if (bold_end > token) limit = bold_end;
            }
          }
        } else {
          parse_numbering(text, &token);
        }
        const auto cut = cut_title(text, token, limit);
        step.title = std::string(text.substr(cut.text_start, cut.text_end - cut.text_start));
        step.title_text_start = a.span.start + cut.text_start;
        title_end = a.span.start + cut.span_end;
        break;
      }
      case StepGenerator::OrderedList:
      case StepGenerator::LeadNumberedListItems:
      case StepGenerator::NumberedTableRows: {
        std::size_t lo = a.span.start;
        if (s.generator == StepGenerator::NumberedTableRows) {
          for (auto c : a.children) {
            if (doc.nodes[c].is("td") || doc.nodes[c].is("th")) {
              lo = doc.nodes[c].span.end;
              break;
            }
          }
        } else {
          std::size_t token = 0;
          if (parse_numbering(text, &token)) lo = a.span.start + token;
        }
        lo = a.span.start + skip_spaces(text, lo - a.span.start);
        title_end = lo;
        step.title_text_start = lo;
        const auto blocks = blockify(Region{anchor, last, lo}, doc);
        if (blocks.size() > 1 &&
            (blocks[0].kind == ContentKind::Paragraph || blocks[0].kind == ContentKind::Note)) {
          const std::string_view first = blocks[0].text;
          auto [len, consumed] = leading_sentence(first);
          const auto capped = cap_title(first.substr(0, len));
          if (capped < len) {
            len = capped;
            consumed = capped;
            while (len > 0 && text::is_space(first[len - 1])) --len;
          }
          step.title = std::string(first.substr(0, len));
          step.title_text_start = blocks[0].span.start;
          title_end = blocks[0].span.start + consumed;
        }
        break;
      }
    }
    step.title_span = Span{a.span.start, std::max(title_end, a.span.start)};
    step.content = Region{anchor, last, step.title_span.end};
    steps.push_back(std::move(step));
  }
  return steps;
}

StepType classify_step_type(std::string_view title, std::string_view first_sentence,
                            const CorpusMeta& meta, const EntityLinker* linker) {
  for (auto t : {text::trim(title), text::trim(first_sentence)}) {
    if (t.empty()) continue;
    if (starts_with_marker(t, meta.condition_markers)) return StepType::Conditional;
    if (linker && (text::istarts_with(t, "for ") || text::istarts_with(t, "on "))) {
      const auto clause = t.substr(0, std::min(t.find(','), t.find(':')));
      for (const auto& m : linker->link(clause, 0)) {
        if (m.mention_type == MentionType::Entity && meta.is_constraint_type(m.entity_type))
          return StepType::Conditional;
      }
    }
  }
  return StepType::Sequential;
}

ContentBlock classify_content(NodeId id, const DomDocument& doc) {
  const auto& n = doc.node(id);
  ContentBlock b;
  b.node = id;
  b.kind = kind_of(doc, id, b.attrs);
  b.span = b.kind == ContentKind::Image ? Span{n.span.start, n.span.start} : n.span;
  b.text = std::string(doc.slice(b.span));
  return b;
}

std::vector<ContentBlock> blockify(const Region& region, const DomDocument& doc) {
  std::vector<ContentBlock> out;
  Blockifier(doc, out).run(region);
  return out;
}

bool is_procedural_section(SectionType t) {
  return t == SectionType::Solution || t == SectionType::DiagnosticSteps ||
         t == SectionType::Answer;
}

std::vector<Procedure> extract_procedure(const Section& section, const DomDocument& doc,
                                         const ExtractionContext& ctx, int depth, bool force) {
  if (!force && !is_procedural_section(section.section_type)) return {};
  Extractor ex(doc, ctx, section);
  return ex.extract(section.body(doc), depth).procedures;
}

SectionContent extract_section_content(const Section& section, const DomDocument& doc,
                                       const ExtractionContext& ctx) {
  SectionContent out;
  const auto body = section.body(doc);
  if (is_procedural_section(section.section_type)) {
    Extractor ex(doc, ctx, section);
    auto r = ex.extract(body, 0);
    out.procedures = std::move(r.procedures);
    if (out.procedures.empty()) out.blocks = std::move(r.blocks);
    return out;
  }
  out.blocks = blockify(body, doc);
  return out;
}

}  // namespace micrograph
