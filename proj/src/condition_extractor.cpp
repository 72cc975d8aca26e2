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

#include "micrograph/condition_extractor.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>

#include "micrograph/error.hpp"

namespace micrograph {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kDefaultMarkers = {"if", "when", "unless", "in case", "once"};

const std::unordered_set<std::string> kDeterminers = {
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "all",
    "any", "some", "no", "your", "its", "their", "my", "our", "his", "her", "both"};
const std::unordered_set<std::string> kPronouns = {
    "it", "you", "they", "we", "he", "she", "i", "them", "us", "me", "him",
    "one", "someone", "something", "everything", "nothing", "which", "who"};
const std::unordered_set<std::string> kAdpositions = {
    "in", "on", "at", "for", "to", "from", "with", "by", "of", "into", "onto",
    "under", "over", "about", "through", "via", "within", "without", "as",
    "between", "across", "against", "during", "per", "than", "like", "upon"};
const std::unordered_set<std::string> kSubordinators = {"because", "although", "though",
                                                        "whether", "whereas"};
const std::unordered_set<std::string> kAuxVerbs = {
    "is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
    "had", "do", "does", "did", "can", "could", "will", "would", "should",
    "must", "may", "might", "shall", "cannot", "isn't", "aren't", "doesn't",
    "don't", "didn't", "can't", "won't", "wasn't", "fails", "fail", "occurs",
    "occur", "appears", "appear", "need", "needs", "want", "wants", "see",
    "use", "uses", "get", "gets", "make", "contains", "contain", "receive",
    "receives", "exists", "exist", "return", "returns", "run", "runs"};
const std::unordered_set<std::string> kAdverbs = {
    "not", "also", "then", "again", "now", "only", "already", "still", "just",
    "down", "up", "out", "off", "back", "here", "there", "too", "very", "first",
    "next", "finally", "later", "immediately", "always", "never", "often"};

bool is_word_start(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
}

bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() > suf.size() + 1 && s.substr(s.size() - suf.size()) == suf;
}

bool is_terminal(std::string_view t) { return t == "." || t == ";" || t == "!" || t == "?"; }

bool is_clause_break(std::string_view t) { return t == "," || t == ":"; }

struct RawToken {
  std::string text;
  Span span;
};

std::vector<RawToken> tokenize(std::string_view s) {
  std::vector<RawToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (text::is_space(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_word_start(s[i])) {
      ++j;
      while (j < s.size()) {
        if (text::is_word_char(s[j])) {
          ++j;
        } else if ((s[j] == '.' || s[j] == '\'' || s[j] == '-' || s[j] == '/' || s[j] == '_') &&
                   j + 1 < s.size() && is_word_start(s[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
    } else {
      ++j;
      while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) ++j;
    }
    out.push_back(RawToken{std::string(s.substr(i, j - i)), Span{i, j}});
    i = j;
  }
  return out;
}

std::optional<Span> trimmed(std::string_view text, Span s) {
  while (s.start < s.end && (text::is_space(text[s.start]) || text[s.start] == ',')) ++s.start;
  while (s.end > s.start) {
    char c = text[s.end - 1];
    if (text::is_space(c) || c == ',' || c == ':' || c == '.' || c == ';' || c == '!' || c == '?')
      --s.end;
    else
      break;
  }
  if (s.empty()) return std::nullopt;
  return s;
}

bool marker_at(std::string_view lower, std::size_t i, std::string_view marker) {
  if (lower.compare(i, marker.size(), marker) != 0) return false;
  if (i > 0 && text::is_word_char(lower[i - 1])) return false;
  auto e = i + marker.size();
  return e >= lower.size() || !text::is_word_char(lower[e]);
}

std::optional<ConditionalBlock> make_block(std::string_view text, std::string marker, Span cond,
                                           Span effect, RuleSource source) {
  auto c = trimmed(text, cond);
  auto e = trimmed(text, effect);
  if (!c || !e || c->overlaps(*e)) return std::nullopt;
  ConditionalBlock b;
  b.marker = std::move(marker);
  b.condition_span = *c;
  b.effect_span = *e;
  b.condition_text = std::string(text.substr(c->start, c->size()));
  b.effect_text = std::string(text.substr(e->start, e->size()));
  b.source = source;
  return b;
}

std::optional<ConditionalBlock> dep_rule(std::string_view text, const Sentence& s,
                                         const std::set<std::string>& markers) {
  const auto& toks = s.tokens;
  std::size_t m = toks.size();
  for (std::size_t k = 0; k < toks.size(); ++k) {
    if (toks[k].dep == Dep::Mark && markers.count(toks[k].lemma)) {
      m = k;
      break;
    }
  }
  if (m == toks.size()) return std::nullopt;

  std::size_t content_end = toks.size();
  while (content_end > 0 && is_terminal(toks[content_end - 1].text)) --content_end;
  std::size_t clause_end = content_end;
  for (std::size_t k = m + 1; k < content_end; ++k) {
    if (is_clause_break(toks[k].text)) {
      clause_end = k;
      break;
    }
  }
  if (clause_end <= m + 1) return std::nullopt;

  Span cond{toks[m].span.start, toks[clause_end - 1].span.end};
  Span before{s.span.start, toks[m].span.start};
  Span after{clause_end < content_end ? toks[clause_end].span.end : cond.end,
             content_end > 0 ? toks[content_end - 1].span.end : cond.end};
  if (after.end < after.start) after.end = after.start;

  Span effect;
  const bool has_before = trimmed(text, before).has_value();
  const bool has_after = trimmed(text, after).has_value();
  if (has_before && has_after) {
    // Marked clause in the middle: the effect is the side holding the root.
    std::size_t root = 0;
    for (std::size_t k = 0; k < toks.size(); ++k)
      if (toks[k].dep == Dep::Root) root = k;
    effect = root < m ? before : after;
  } else {
    effect = has_before ? before : after;
  }
  return make_block(text, toks[m].lemma, cond, effect, RuleSource::DepRule);
}

std::optional<ConditionalBlock> pattern_rule(std::string_view text, const Sentence& s,
                                             const std::vector<std::string>& markers) {
  const auto body = trimmed(text, s.span);
  if (!body) return std::nullopt;
  const auto lower = text::to_lower(text.substr(body->start, body->size()));

  // "If X, Y" / "When X, Y" / "In case X, Y" / "For X: Y"
  for (const auto& mk : markers) {
    if (!marker_at(lower, 0, mk)) continue;
    auto brk = lower.find(',', mk.size());
    if (brk == std::string::npos) brk = lower.find(':', mk.size());
    if (brk == std::string::npos) continue;
    Span cond{body->start, body->start + brk};
    Span effect{body->start + brk + 1, body->end};
    if (auto b = make_block(text, mk, cond, effect, RuleSource::PatternRule)) return b;
  }
  // "Y if X". Prepositional markers only open a sentence.
  std::optional<std::pair<std::size_t, std::string>> best;
  for (const auto& mk : markers) {
    if (kAdpositions.count(mk)) continue;
    for (std::size_t i = 1; i < lower.size(); ++i) {
      if (marker_at(lower, i, mk)) {
        if (!best || i < best->first) best = {i, mk};
        break;
      }
    }
  }
  if (best) {
    Span effect{body->start, body->start + best->first};
    Span cond{body->start + best->first, body->end};
    return make_block(text, best->second, cond, effect, RuleSource::PatternRule);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Pos p) {
  switch (p) {
    case Pos::VERB: return "VERB";
    case Pos::NOUN: return "NOUN";
    case Pos::ADJ: return "ADJ";
    case Pos::ADV: return "ADV";
    case Pos::ADP: return "ADP";
    case Pos::SCONJ: return "SCONJ";
    case Pos::DET: return "DET";
    case Pos::PRON: return "PRON";
    case Pos::NUM: return "NUM";
    case Pos::PUNCT: return "PUNCT";
    case Pos::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Dep d) {
  switch (d) {
    case Dep::Mark: return "mark";
    case Dep::Advcl: return "advcl";
    case Dep::Root: return "root";
    case Dep::Other: return "other";
  }
  return "other";
}

std::string_view to_string(RuleSource s) {
  return s == RuleSource::DepRule ? "DepRule" : "PatternRule";
}

BaselineAnnotator::BaselineAnnotator(std::vector<std::string> condition_markers,
                                     std::vector<std::string> extra_verbs) {
  if (condition_markers.empty()) condition_markers = kDefaultMarkers;
  for (auto& m : condition_markers) {
    auto norm = text::to_lower(text::collapse_whitespace(m));
    if (norm.find(' ') != std::string::npos) multiword_markers_.push_back(norm);
    markers_.insert(std::move(norm));
  }
  std::sort(multiword_markers_.begin(), multiword_markers_.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (auto& v : extra_verbs) verbs_.insert(text::to_lower(v));
}

Pos BaselineAnnotator::tag(std::string_view w) const {
  if (w.empty()) return Pos::OTHER;
  const std::string lower(w);
  if (!is_word_start(w[0])) return Pos::PUNCT;
  if (std::isdigit(static_cast<unsigned char>(w[0]))) return Pos::NUM;
  if (markers_.count(lower) || kSubordinators.count(lower)) return Pos::SCONJ;
  if (kDeterminers.count(lower)) return Pos::DET;
  if (kPronouns.count(lower)) return Pos::PRON;
  if (kAdpositions.count(lower)) return Pos::ADP;
  if (kAuxVerbs.count(lower) || verbs_.count(lower)) return Pos::VERB;
  if (kAdverbs.count(lower)) return Pos::ADV;
  if (ends_with(lower, "ly")) return Pos::ADV;
  if (ends_with(lower, "ed") || ends_with(lower, "ing") || ends_with(lower, "ize") ||
      ends_with(lower, "ise") || ends_with(lower, "ify"))
    return Pos::VERB;
  if (ends_with(lower, "able") || ends_with(lower, "ible") || ends_with(lower, "ful") ||
      ends_with(lower, "ous") || ends_with(lower, "ive") || ends_with(lower, "less"))
    return Pos::ADJ;
  return Pos::NOUN;
}

std::vector<Sentence> BaselineAnnotator::annotate(std::string_view text) const {
  auto raw = tokenize(text);

  // Merge multiword markers ("in case") into single tokens.
  if (!multiword_markers_.empty()) {
    std::vector<RawToken> merged;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      bool done = false;
      for (const auto& mw : multiword_markers_) {
        std::string acc;
        std::size_t k = i;
        while (k < raw.size() && acc.size() < mw.size()) {
          if (!acc.empty()) acc.push_back(' ');
          acc += text::to_lower(raw[k].text);
          ++k;
        }
        if (acc == mw) {
          merged.push_back(RawToken{std::string(text.substr(raw[i].span.start,
                                                            raw[k - 1].span.end - raw[i].span.start)),
                                    Span{raw[i].span.start, raw[k - 1].span.end}});
          i = k - 1;
          done = true;
          break;
        }
      }
      if (!done) merged.push_back(raw[i]);
    }
    raw = std::move(merged);
  }

  std::vector<Sentence> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool split = false;
    if (is_terminal(raw[i].text)) {
      const auto next = raw[i].span.end;
      split = next >= text.size() || text::is_space(text[next]);
      if (split && raw[i].text == "." && i > 0) {
        const auto& prev = raw[i - 1].text;
        if (prev.size() == 1 && std::isupper(static_cast<unsigned char>(prev[0]))) split = false;
      }
    }
    if (!split && i + 1 < raw.size()) continue;

    Sentence s;
    for (std::size_t k = begin; k <= i; ++k) {
      AnnotatedToken t;
      t.text = raw[k].text;
      t.lemma = text::to_lower(text::collapse_whitespace(raw[k].text));
      t.pos = tag(t.lemma);
      t.span = raw[k].span;
      s.tokens.push_back(std::move(t));
    }
    s.span = Span{raw[begin].span.start, raw[i].span.end};
    begin = i + 1;

    auto& toks = s.tokens;
    for (std::size_t k = 1; k < toks.size(); ++k)
      if (toks[k].pos == Pos::SCONJ && kAdpositions.count(toks[k].lemma)) toks[k].pos = Pos::ADP;
    // Imperatives: an unknown first word, or the first word after a PRON,
    // is a verb.
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (toks[k].pos == Pos::PUNCT) continue;
      if (toks[k].pos == Pos::NOUN) toks[k].pos = Pos::VERB;
      break;
    }
    for (std::size_t k = 1; k < toks.size(); ++k)
      if (toks[k - 1].pos == Pos::PRON && toks[k].pos == Pos::NOUN) toks[k].pos = Pos::VERB;

    std::optional<std::size_t> mark;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (toks[k].pos == Pos::SCONJ && markers_.count(toks[k].lemma)) {
        mark = k;
        break;
      }
    }
    std::size_t clause_begin = toks.size(), clause_end = toks.size();
    if (mark) {
      clause_begin = *mark;
      for (std::size_t k = *mark + 1; k < toks.size(); ++k) {
        if (is_clause_break(toks[k].text) || is_terminal(toks[k].text)) {
          clause_end = k;
          break;
        }
      }
      // The first word of the main clause after the comma is imperative.
      if (clause_end < toks.size() && is_clause_break(toks[clause_end].text)) {
        for (std::size_t k = clause_end + 1; k < toks.size(); ++k) {
          if (toks[k].pos == Pos::PUNCT) continue;
          if (toks[k].pos == Pos::NOUN) toks[k].pos = Pos::VERB;
          break;
        }
      }
    }
    auto outside = [&](std::size_t k) { return k < clause_begin || k >= clause_end; };

    std::optional<std::size_t> root;
    for (std::size_t k = 0; k < toks.size() && !root; ++k)
      if (outside(k) && toks[k].pos == Pos::VERB) root = k;
    for (std::size_t k = 0; k < toks.size() && !root; ++k)
      if (outside(k) && toks[k].pos != Pos::PUNCT) root = k;
    if (!root) root = 0;

    for (auto& t : toks) {
      t.dep = Dep::Other;
      t.head = *root;
    }
    toks[*root].dep = Dep::Root;
    toks[*root].head = *root;
    if (mark && *mark != *root) {
      std::optional<std::size_t> verb;
      for (std::size_t k = *mark + 1; k < clause_end && !verb; ++k)
        if (toks[k].pos == Pos::VERB) verb = k;
      toks[*mark].dep = Dep::Mark;
      toks[*mark].head = verb.value_or(*root);
      if (verb) {
        toks[*verb].dep = Dep::Advcl;
        toks[*verb].head = *root;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

SidecarAnnotator::SidecarAnnotator(std::unordered_map<std::string, std::vector<Sentence>> entries,
                                   std::shared_ptr<const Annotator> fallback)
    : entries_(std::move(entries)), fallback_(std::move(fallback)) {}

SidecarAnnotator SidecarAnnotator::load(const std::string& path,
                                        std::shared_ptr<const Annotator> fallback) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations file '" + path + "'");
  std::unordered_map<std::string, std::vector<Sentence>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SyntaxError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const auto where = "line " + std::to_string(lineno);
    if (!j.is_object() || !j.contains("text_sha256") || !j["text_sha256"].is_string())
      throw SchemaError(where + ".text_sha256", "missing or not a string");
    if (!j.contains("sentences") || !j["sentences"].is_array())
      throw SchemaError(where + ".sentences", "missing or not an array");
    std::vector<Sentence> sentences;
    for (const auto& s : j["sentences"]) sentences.push_back(sentence_from_json(s));
    entries[j["text_sha256"].get<std::string>()] = std::move(sentences);
  }
  return SidecarAnnotator(std::move(entries), std::move(fallback));
}

std::vector<Sentence> SidecarAnnotator::annotate(std::string_view text) const {
  if (auto it = entries_.find(text::sha256_hex(text)); it != entries_.end()) return it->second;
  ++misses_;
  return fallback_ ? fallback_->annotate(text) : std::vector<Sentence>{};
}

json sentence_to_json(const Sentence& s) {
  json toks = json::array();
  for (const auto& t : s.tokens)
    toks.push_back({{"text", t.text},
                    {"lemma", t.lemma},
                    {"pos", to_string(t.pos)},
                    {"dep", to_string(t.dep)},
                    {"head", t.head},
                    {"span", {t.span.start, t.span.end}}});
  return {{"span", {s.span.start, s.span.end}}, {"tokens", std::move(toks)}};
}

Sentence sentence_from_json(const json& j) {
  auto span_of = [](const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned())
      throw SchemaError(path, "expected [start, end]");
    return Span{v[0].get<std::size_t>(), v[1].get<std::size_t>()};
  };
  if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array())
    throw SchemaError("sentence.tokens", "missing or not an array");
  Sentence s;
  s.span = span_of(j.value("span", json()), "sentence.span");
  for (const auto& t : j["tokens"]) {
    AnnotatedToken tok;
    tok.text = t.value("text", "");
    tok.lemma = t.value("lemma", text::to_lower(tok.text));
    const auto pos = t.value("pos", "OTHER");
    for (int p = 0; p <= static_cast<int>(Pos::OTHER); ++p)
      if (to_string(static_cast<Pos>(p)) == pos) tok.pos = static_cast<Pos>(p);
    const auto dep = t.value("dep", "other");
    for (int d = 0; d <= static_cast<int>(Dep::Other); ++d)
      if (to_string(static_cast<Dep>(d)) == dep) tok.dep = static_cast<Dep>(d);
    tok.head = t.value("head", std::size_t{0});
    tok.span = span_of(t.value("span", json()), "token.span");
    s.tokens.push_back(std::move(tok));
  }
  for (const auto& t : s.tokens)
    if (t.head >= s.tokens.size()) throw SchemaError("token.head", "head index out of range");
  return s;
}

std::string sidecar_line(std::string_view text, const std::vector<Sentence>& sentences) {
  json j;
  j["text_sha256"] = text::sha256_hex(text);
  j["sentences"] = json::array();
  for (const auto& s : sentences) j["sentences"].push_back(sentence_to_json(s));
  return j.dump();
}

std::vector<Sentence> annotate(std::string_view text) {
  static const BaselineAnnotator baseline;
  return baseline.annotate(text);
}

std::vector<ConditionalBlock> extract_conditionals(std::string_view text,
                                                   const std::vector<Sentence>& sentences,
                                                   const CorpusMeta& meta) {
  const std::set<std::string> marker_set(meta.condition_markers.begin(),
                                         meta.condition_markers.end());
  std::vector<std::string> markers(marker_set.begin(), marker_set.end());
  std::sort(markers.begin(), markers.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<ConditionalBlock> out;
  for (const auto& s : sentences) {
    if (s.tokens.empty() || s.span.end > text.size()) continue;
    auto block = dep_rule(text, s, marker_set);
    if (!block) block = pattern_rule(text, s, markers);
    if (!block) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const ConditionalBlock& b) {
      return b.condition_span == block->condition_span && b.effect_span == block->effect_span;
    });
    if (!dup) out.push_back(std::move(*block));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.condition_span.start < b.condition_span.start;
  });
  return out;
}

}  // namespace micrograph
