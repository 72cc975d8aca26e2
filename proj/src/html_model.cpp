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

#include "micrograph/html_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "micrograph/error.hpp"

namespace micrograph {

namespace {

const std::unordered_set<std::string_view> kVoidTags = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kBlockTags = {
    "address", "article", "aside", "blockquote", "body", "br", "caption",
    "center", "dd", "details", "dir", "div", "dl", "dt", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5",
    "h6", "head", "header", "hr", "html", "li", "main", "menu", "nav", "ol",
    "p", "pre", "section", "summary", "table", "tbody", "td", "tfoot", "th",
    "thead", "title", "tr", "ul"};

// Opening one of these closes an open <p>.
const std::unordered_set<std::string_view> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "center", "dd", "details",
    "dir", "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main",
    "menu", "nav", "ol", "p", "pre", "section", "table", "ul"};

// Subtrees whose content never reaches page_text.
const std::unordered_set<std::string_view> kExcludedTags = {
    "script", "style", "#comment", "title", "template", "noscript"};

const std::unordered_map<std::string_view, char32_t> kEntities = {
    {"amp", '&'},      {"lt", '<'},        {"gt", '>'},        {"quot", '"'},
    {"apos", '\''},    {"nbsp", 0xA0},     {"copy", 0xA9},     {"reg", 0xAE},
    {"trade", 0x2122}, {"mdash", 0x2014},  {"ndash", 0x2013},  {"hellip", 0x2026},
    {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
    {"bull", 0x2022},  {"middot", 0xB7},   {"times", 0xD7},    {"laquo", 0xAB},
    {"raquo", 0xBB},   {"rarr", 0x2192},   {"larr", 0x2190},   {"deg", 0xB0},
    {"shy", 0xAD},     {"zwj", 0x200D},    {"zwnj", 0x200C},   {"ensp", 0x2002},
    {"emsp", 0x2003},  {"thinsp", 0x2009}, {"sect", 0xA7},     {"para", 0xB6}};

struct RawNode {
  bool is_text = false;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;
  std::vector<std::size_t> children;
  std::size_t parent = 0;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_';
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    auto name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      char32_t cp = 0;
      bool ok = name.size() > 1;
      bool hex = ok && (name[1] == 'x' || name[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; ok && k < name.size(); ++k) {
        auto c = static_cast<unsigned char>(name[k]);
        int digit = std::isdigit(c) ? c - '0'
                    : (hex && std::isxdigit(c)) ? std::tolower(c) - 'a' + 10
                                                : -1;
        if (digit < 0 || cp > 0x10FFFF) ok = false;
        else cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(digit);
      }
      if (ok && name.size() > (hex ? 2u : 1u)) {
        text::append_utf8(out, cp == 0 ? 0xFFFD : cp);
        i = semi;
        continue;
      }
    } else if (auto it = kEntities.find(name); it != kEntities.end()) {
      text::append_utf8(out, it->second);
      i = semi;
      continue;
    }
    out.push_back('&');
  }
  return out;
}

// Decode one UTF-8 sequence at s[i]; the input is already validated.
char32_t decode_at(std::string_view s, std::size_t i, std::size_t& len) {
  auto c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    len = 1;
    return c;
  }
  len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
  char32_t cp = c & (len == 2 ? 0x1F : len == 3 ? 0x0F : 0x07);
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  return cp;
}

bool is_zero_width(char32_t cp) {
  return cp == 0x200B || cp == 0x200C || cp == 0x200D || cp == 0x2060 ||
         cp == 0xFEFF || cp == 0xAD;
}

bool is_unicode_space(char32_t cp) {
  return cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000 || cp == 0x1680;
}

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view src) : src_(src) {
    nodes_.push_back(RawNode{false, "#document", {}, {}, {}, 0});
    stack_.push_back(0);
  }

  void run() {
    std::size_t i = 0;
    const auto n = src_.size();
    std::size_t text_start = 0;
    auto flush = [&](std::size_t end) {
      if (end > text_start) add_text(decode_entities(src_.substr(text_start, end - text_start)));
    };
    while (i < n) {
      if (src_[i] != '<') {
        ++i;
        continue;
      }
      if (src_.compare(i, 4, "<!--") == 0) {
        flush(i);
        auto end = src_.find("-->", i + 4);
        append_leaf("#comment");
        i = end == std::string_view::npos ? n : end + 3;
        text_start = i;
      } else if (i + 1 < n && (src_[i + 1] == '!' || src_[i + 1] == '?')) {
        flush(i);
        auto end = src_.find('>', i);
        i = end == std::string_view::npos ? n : end + 1;
        text_start = i;
      } else if (i + 2 < n && src_[i + 1] == '/' && std::isalpha(static_cast<unsigned char>(src_[i + 2]))) {
        flush(i);
        std::size_t j = i + 2;
        while (j < n && is_name_char(src_[j])) ++j;
        auto name = text::to_lower(src_.substr(i + 2, j - i - 2));
        auto end = src_.find('>', j);
        i = end == std::string_view::npos ? n : end + 1;
        text_start = i;
        end_tag(name);
      } else if (i + 1 < n && std::isalpha(static_cast<unsigned char>(src_[i + 1]))) {
        flush(i);
        i = start_tag(i);
        text_start = i;
      } else {
        ++i;  // literal '<'
      }
    }
    flush(n);
  }

  std::vector<RawNode> take() { return std::move(nodes_); }
  std::optional<std::string> head_title;

 private:
  std::size_t current() const { return stack_.back(); }

  void add_text(std::string text) {
    if (text.empty()) return;
    auto& parent_children = nodes_[current()].children;
    // Merge with a directly preceding text sibling.
    if (!parent_children.empty() && nodes_[parent_children.back()].is_text) {
      nodes_[parent_children.back()].text += text;
      return;
    }
    RawNode t;
    t.is_text = true;
    t.text = std::move(text);
    t.parent = current();
    nodes_.push_back(std::move(t));
    nodes_[current()].children.push_back(nodes_.size() - 1);
  }

  std::size_t append_leaf(std::string tag,
                          std::vector<std::pair<std::string, std::string>> attrs = {}) {
    RawNode e;
    e.tag = std::move(tag);
    e.attrs = std::move(attrs);
    e.parent = current();
    nodes_.push_back(std::move(e));
    nodes_[current()].children.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  bool on_stack(std::string_view tag) const {
    return std::any_of(stack_.begin(), stack_.end(),
                       [&](std::size_t id) { return nodes_[id].tag == tag; });
  }

  // Pop up to and including the nearest open element whose tag is in
  // `targets`, unless a tag in `boundaries` is reached first.
  void close_nearest(std::initializer_list<std::string_view> targets,
                     std::initializer_list<std::string_view> boundaries) {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      const auto& tag = nodes_[stack_[k]].tag;
      if (std::find(targets.begin(), targets.end(), tag) != targets.end()) {
        stack_.resize(k);
        return;
      }
      if (std::find(boundaries.begin(), boundaries.end(), tag) != boundaries.end()) return;
    }
  }

  void implicit_close(const std::string& tag) {
    if (kClosesParagraph.count(tag))
      close_nearest({"p"}, {"table", "td", "th", "caption", "html", "button", "object"});
    if (tag == "li") close_nearest({"li"}, {"ul", "ol", "menu", "dir", "table", "td", "th"});
    if (tag == "dt" || tag == "dd") close_nearest({"dt", "dd"}, {"dl", "table", "td", "th"});
    if (tag == "tr") close_nearest({"tr"}, {"table", "tbody", "thead", "tfoot"});
    if (tag == "td" || tag == "th") close_nearest({"td", "th"}, {"tr", "table"});
    if (tag == "tbody" || tag == "thead" || tag == "tfoot")
      close_nearest({"tbody", "thead", "tfoot"}, {"table"});
    if (is_heading_tag(tag) && is_heading_tag(nodes_[current()].tag)) stack_.pop_back();
  }

  void end_tag(const std::string& name) {
    if (name == "br") {
      append_leaf("br");
      return;
    }
    if (kVoidTags.count(name)) return;
    static const std::unordered_set<std::string_view> kTableFamily = {
        "table", "tbody", "thead", "tfoot", "tr", "td", "th", "caption"};
    const bool table_family = kTableFamily.count(name) > 0;
    for (std::size_t k = stack_.size(); k-- > 1;) {
      const auto& tag = nodes_[stack_[k]].tag;
      if (tag == name) {
        stack_.resize(k);
        return;
      }
      if (table_family ? (tag == "table") : (tag == "td" || tag == "th" || tag == "table" ||
                                             tag == "caption"))
        return;
    }
  }

  std::size_t start_tag(std::size_t i) {
    const auto n = src_.size();
    std::size_t j = i + 1;
    while (j < n && is_name_char(src_[j])) ++j;
    auto tag = text::to_lower(src_.substr(i + 1, j - i - 1));
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closing = false;
    while (j < n) {
      while (j < n && text::is_space(src_[j])) ++j;
      if (j >= n) break;
      if (src_[j] == '>') {
        ++j;
        break;
      }
      if (src_[j] == '/') {
        if (j + 1 < n && src_[j + 1] == '>') {
          self_closing = true;
          j += 2;
          break;
        }
        ++j;
        continue;
      }
      std::size_t k = j;
      while (k < n && !text::is_space(src_[k]) && src_[k] != '=' && src_[k] != '>' &&
             !(src_[k] == '/' && k + 1 < n && src_[k + 1] == '>'))
        ++k;
      auto name = text::to_lower(src_.substr(j, k - j));
      if (k == j) ++k;  // stray character
      j = k;
      while (j < n && text::is_space(src_[j])) ++j;
      std::string value;
      if (j < n && src_[j] == '=') {
        ++j;
        while (j < n && text::is_space(src_[j])) ++j;
        if (j < n && (src_[j] == '"' || src_[j] == '\'')) {
          char q = src_[j];
          auto end = src_.find(q, j + 1);
          if (end == std::string_view::npos) end = n;
          value = decode_entities(src_.substr(j + 1, end - j - 1));
          j = end < n ? end + 1 : n;
        } else {
          std::size_t k2 = j;
          while (k2 < n && !text::is_space(src_[k2]) && src_[k2] != '>') ++k2;
          value = decode_entities(src_.substr(j, k2 - j));
          j = k2;
        }
      }
      if (!name.empty() &&
          std::none_of(attrs.begin(), attrs.end(), [&](const auto& a) { return a.first == name; }))
        attrs.emplace_back(std::move(name), std::move(value));
    }

    if (tag == "script" || tag == "style" || tag == "title" || tag == "textarea" ||
        tag == "template" || tag == "noscript") {
      // Raw text content up to the matching end tag.
      std::size_t end = j;
      std::size_t resume = n;
      while (true) {
        end = src_.find("</", end);
        if (end == std::string_view::npos) {
          end = n;
          break;
        }
        if (text::istarts_with(src_.substr(end + 2), tag) &&
            (end + 2 + tag.size() >= n || !is_name_char(src_[end + 2 + tag.size()]))) {
          auto gt = src_.find('>', end);
          resume = gt == std::string_view::npos ? n : gt + 1;
          break;
        }
        end += 2;
      }
      auto content = src_.substr(j, end - j);
      if (tag == "textarea") {
        implicit_close(tag);
        auto id = append_leaf(tag, std::move(attrs));
        stack_.push_back(id);
        add_text(decode_entities(content));
        stack_.pop_back();
      } else {
        if (tag == "title" && !head_title) {
          auto t = text::collapse_whitespace(decode_entities(content));
          if (!t.empty()) head_title = std::move(t);
        }
        append_leaf(tag, std::move(attrs));
      }
      return end == n ? n : resume;
    }

    implicit_close(tag);
    auto id = append_leaf(tag, std::move(attrs));
    if (!self_closing && !kVoidTags.count(tag)) stack_.push_back(id);
    return j;
  }

  std::string_view src_;
  std::vector<RawNode> nodes_;
  std::vector<std::size_t> stack_;
};

class Normalizer {
 public:
  Normalizer(const std::vector<RawNode>& raw, DomDocument& doc) : raw_(raw), doc_(doc) {}

  void run() {
    visit(0, std::nullopt, 0, false);
    fix_spans();
  }

 private:
  void visit(std::size_t raw_id, std::optional<NodeId> parent, std::size_t depth,
             bool excluded) {
    const auto& r = raw_[raw_id];
    if (r.is_text) {
      if (excluded) return;
      emit_text(r.text, parent, depth);
      return;
    }
    const NodeId id = doc_.nodes.size();
    DomNode e;
    e.id = id;
    e.kind = NodeKind::Element;
    e.tag = r.tag;
    e.attrs = r.attrs;
    e.parent = parent;
    e.depth = depth;
    doc_.nodes.push_back(std::move(e));
    if (parent) doc_.nodes[*parent].children.push_back(id);

    const bool block = is_block_tag(r.tag);
    const bool skip = excluded || kExcludedTags.count(r.tag) > 0;
    if (block) pending_ = true;
    for (auto child : r.children) visit(child, id, depth + 1, skip);
    if (block) pending_ = true;
    doc_.nodes[id].last = doc_.nodes.size() - 1;
  }

  void emit_text(const std::string& raw, std::optional<NodeId> parent, std::size_t depth) {
    std::string out;
    bool local_pending = false;
    bool started = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i < raw.size();) {
      std::size_t len = 1;
      char32_t cp = decode_at(raw, i, len);
      auto piece = std::string_view(raw).substr(i, len);
      i += len;
      if (is_zero_width(cp)) continue;
      if ((len == 1 && text::is_space(piece[0])) || is_unicode_space(cp)) {
        if (started) local_pending = true;
        else pending_ = true;
        continue;
      }
      if (!started) {
        if (pending_ && !doc_.page_text.empty()) doc_.page_text.push_back(' ');
        pending_ = false;
        start = doc_.page_text.size();
        started = true;
      } else if (local_pending) {
        out.push_back(' ');
        local_pending = false;
      }
      out.append(piece);
    }
    if (!started) return;
    doc_.page_text += out;
    if (local_pending) pending_ = true;

    DomNode t;
    t.id = doc_.nodes.size();
    t.kind = NodeKind::Text;
    t.text = std::move(out);
    t.parent = parent;
    t.depth = depth;
    t.span = Span{start, doc_.page_text.size()};
    t.last = t.id;
    doc_.nodes.push_back(std::move(t));
    if (parent) doc_.nodes[*parent].children.push_back(doc_.nodes.back().id);
  }

  // Element spans are the tight hull of their Text descendants. Elements
  // without text get an empty span at the end of the preceding text,
  // clamped into the parent's span.
  void fix_spans() {
    auto& nodes = doc_.nodes;
    std::vector<bool> has_text(nodes.size(), false);
    for (std::size_t k = nodes.size(); k-- > 0;) {
      auto& n = nodes[k];
      if (n.is_text()) has_text[k] = true;
      if (!has_text[k] || !n.parent) continue;
      auto& p = nodes[*n.parent];
      if (!has_text[*n.parent]) {
        p.span = n.span;
        has_text[*n.parent] = true;
      } else {
        p.span.start = std::min(p.span.start, n.span.start);
        p.span.end = std::max(p.span.end, n.span.end);
      }
    }
    std::size_t prev_end = 0;
    for (auto& n : nodes) {
      if (n.is_text()) {
        prev_end = n.span.end;
        continue;
      }
      if (has_text[n.id]) continue;
      std::size_t pos = prev_end;
      if (n.parent) {
        const auto& ps = nodes[*n.parent].span;
        pos = std::clamp(pos, ps.start, ps.end);
      }
      n.span = Span{pos, pos};
    }
  }

  const std::vector<RawNode>& raw_;
  DomDocument& doc_;
  bool pending_ = false;
};

std::optional<std::string> find_source_url(const DomDocument& doc) {
  for (const auto& n : doc.nodes) {
    if (n.is("link")) {
      auto rel = n.attr("rel");
      auto href = n.attr("href");
      if (rel && href && text::iequals(text::trim(*rel), "canonical") && !text::trim(*href).empty())
        return std::string(text::trim(*href));
    }
    if (n.is("meta")) {
      auto prop = n.attr("property");
      if (!prop) prop = n.attr("name");
      auto content = n.attr("content");
      if (prop && content && (text::iequals(*prop, "og:url") || text::iequals(*prop, "url")) &&
          !text::trim(*content).empty())
        return std::string(text::trim(*content));
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string_view> DomNode::attr(std::string_view name) const {
  for (const auto& [k, v] : attrs)
    if (k == name) return std::string_view(v);
  return std::nullopt;
}

const DomNode& DomDocument::node(NodeId id) const {
  if (id >= nodes.size()) throw UnknownNode("node id " + std::to_string(id) + " does not exist");
  return nodes[id];
}

bool is_block_tag(std::string_view tag) { return kBlockTags.count(tag) > 0; }

bool is_heading_tag(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

DomDocument parse_html(std::string_view bytes) {
  if (bytes.empty()) throw EmptyDocument("input is empty");
  // Skip a UTF-8 byte order mark.
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  const auto valid = text::valid_utf8_prefix(bytes);
  if (valid == 0 && !bytes.empty()) throw EncodingError("input has no valid UTF-8 prefix");

  DomDocument doc;
  if (valid < bytes.size()) doc.truncated_at = valid;
  TreeBuilder builder(bytes.substr(0, valid));
  builder.run();
  doc.head_title = builder.head_title;
  auto raw = builder.take();
  Normalizer(raw, doc).run();
  doc.root = 0;
  doc.source_url = find_source_url(doc);
  return doc;
}

std::string text_of(const DomDocument& doc, NodeId id) {
  return std::string(doc.slice(doc.node(id).span));
}

}  // namespace micrograph
