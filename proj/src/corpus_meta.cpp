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

#include "micrograph/corpus_meta.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "micrograph/error.hpp"
#include "micrograph/text.hpp"

namespace micrograph {

namespace {

constexpr std::array<std::pair<SectionType, std::string_view>, 12> kSectionNames{{
    {SectionType::Title, "Title"},
    {SectionType::Question, "Question"},
    {SectionType::Answer, "Answer"},
    {SectionType::Problem, "Problem"},
    {SectionType::Symptom, "Symptom"},
    {SectionType::Cause, "Cause"},
    {SectionType::DiagnosticSteps, "DiagnosticSteps"},
    {SectionType::Solution, "Solution"},
    {SectionType::Constraints, "Constraints"},
    {SectionType::RelatedInformation, "RelatedInformation"},
    {SectionType::References, "References"},
    {SectionType::Other, "Other"},
}};

using json = nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + key, "missing required field");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected array");
  return v;
}

std::vector<std::string> string_list(const json& obj, const std::string& key,
                                     const std::string& prefix) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  const auto path = prefix + key;
  for (std::size_t i = 0; i < as_array(*it, path).size(); ++i) {
    auto s = as_string((*it)[i], path + "[" + std::to_string(i) + "]");
    if (text::trim(s).empty())
      throw SchemaError(path + "[" + std::to_string(i) + "]", "empty string");
    out.push_back(std::move(s));
  }
  return out;
}

SectionType parse_section_type(const json& v, const std::string& path) {
  auto name = as_string(v, path);
  auto t = section_type_from_string(name);
  if (!t) throw SchemaError(path, "unknown section type '" + name + "'");
  return *t;
}

Pattern parse_pattern(const json& v, const std::string& path) {
  auto src = as_string(v, path);
  if (src.empty()) throw SchemaError(path, "empty pattern");
  try {
    return Pattern(std::move(src));
  } catch (const std::regex_error& e) {
    throw SchemaError(path, std::string("invalid pattern: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(SectionType t) {
  for (const auto& [type, name] : kSectionNames)
    if (type == t) return name;
  return "Other";
}

std::optional<SectionType> section_type_from_string(std::string_view s) {
  for (const auto& [type, name] : kSectionNames)
    if (name == s) return type;
  return std::nullopt;
}

Pattern::Pattern(std::string source)
    : source_(std::move(source)),
      re_(std::make_shared<const std::regex>(
          source_, std::regex::ECMAScript | std::regex::icase | std::regex::optimize)) {}

bool Pattern::full_match(std::string_view s) const {
  return re_ && std::regex_match(s.begin(), s.end(), *re_);
}

bool Pattern::search(std::string_view s) const {
  return re_ && std::regex_search(s.begin(), s.end(), *re_);
}

bool CorpusMeta::is_constraint_type(std::string_view entity_type) const {
  return std::find(constraint_entity_types.begin(), constraint_entity_types.end(),
                   entity_type) != constraint_entity_types.end();
}

CorpusMeta load_meta(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("meta config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected a JSON object");

  CorpusMeta meta;
  meta.corpus_id = as_string(require(doc, "corpus_id", ""), "corpus_id");

  const auto& types = as_array(require(doc, "doc_types", ""), "doc_types");
  if (types.empty()) throw SchemaError("doc_types", "must not be empty");
  std::unordered_set<std::string> type_names;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto path = "doc_types[" + std::to_string(i) + "].";
    const auto& t = types[i];
    if (!t.is_object()) throw SchemaError(path.substr(0, path.size() - 1), "expected object");
    DocTypeSpec doc_type;
    doc_type.name = as_string(require(t, "name", path), path + "name");
    if (!type_names.insert(doc_type.name).second)
      throw DuplicateError("duplicate doc type name '" + doc_type.name + "'");
    if (auto it = t.find("required_sections"); it != t.end()) {
      const auto& arr = as_array(*it, path + "required_sections");
      for (std::size_t k = 0; k < arr.size(); ++k)
        doc_type.required_sections.push_back(parse_section_type(
            arr[k], path + "required_sections[" + std::to_string(k) + "]"));
    }
    if (auto it = t.find("title_patterns"); it != t.end()) {
      const auto& arr = as_array(*it, path + "title_patterns");
      for (std::size_t k = 0; k < arr.size(); ++k)
        doc_type.title_patterns.push_back(
            parse_pattern(arr[k], path + "title_patterns[" + std::to_string(k) + "]"));
    }
    meta.doc_types.push_back(std::move(doc_type));
  }

  if (auto it = doc.find("section_heading_map"); it != doc.end()) {
    const auto& arr = as_array(*it, "section_heading_map");
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto path = "section_heading_map[" + std::to_string(i) + "].";
      if (!arr[i].is_object()) throw SchemaError(path.substr(0, path.size() - 1), "expected object");
      HeadingRule rule;
      rule.pattern = parse_pattern(require(arr[i], "pattern", path), path + "pattern");
      rule.section_type = parse_section_type(require(arr[i], "section_type", path),
                                             path + "section_type");
      if (!seen.insert(text::to_lower(rule.pattern.source())).second)
        throw DuplicateError("duplicate heading pattern '" + rule.pattern.source() + "'");
      meta.section_heading_map.push_back(std::move(rule));
    }
  } else {
    throw SchemaError("section_heading_map", "missing required field");
  }

  meta.constraint_entity_types = string_list(doc, "constraint_entity_types", "");

  if (auto it = doc.find("entity_dictionary"); it != doc.end()) {
    const auto& arr = as_array(*it, "entity_dictionary");
    std::unordered_set<std::string> canonicals;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto path = "entity_dictionary[" + std::to_string(i) + "].";
      if (!arr[i].is_object()) throw SchemaError(path.substr(0, path.size() - 1), "expected object");
      DictionaryEntry e;
      e.canonical = as_string(require(arr[i], "canonical", path), path + "canonical");
      if (text::trim(e.canonical).empty()) throw SchemaError(path + "canonical", "empty string");
      e.entity_type = as_string(require(arr[i], "entity_type", path), path + "entity_type");
      require(arr[i], "surface_forms", path);
      e.surface_forms = string_list(arr[i], "surface_forms", path);
      if (e.surface_forms.empty()) throw SchemaError(path + "surface_forms", "must not be empty");
      if (std::find(e.surface_forms.begin(), e.surface_forms.end(), e.canonical) ==
          e.surface_forms.end())
        e.surface_forms.push_back(e.canonical);
      if (!canonicals.insert(e.canonical).second)
        throw DuplicateError("duplicate canonical '" + e.canonical + "'");
      meta.entity_dictionary.push_back(std::move(e));
    }
  }

  meta.action_lexicon = string_list(doc, "action_lexicon", "");
  meta.step_cue_lexicon = string_list(doc, "step_cue_lexicon", "");
  meta.condition_markers = string_list(doc, "condition_markers", "");
  for (auto& m : meta.condition_markers) m = text::to_lower(text::collapse_whitespace(m));
  for (auto& a : meta.action_lexicon) a = text::to_lower(a);

  if (auto it = doc.find("entity_linking_enabled"); it != doc.end()) {
    if (!it->is_boolean()) throw SchemaError("entity_linking_enabled", "expected boolean");
    meta.entity_linking_enabled = it->get<bool>();
  }
  if (auto it = doc.find("embedding_table"); it != doc.end() && !it->is_null())
    meta.embedding_table = as_string(*it, "embedding_table");
  return meta;
}

CorpusMeta load_meta_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open meta config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_meta(ss.str());
}

json meta_to_json(const CorpusMeta& meta) {
  json doc;
  doc["corpus_id"] = meta.corpus_id;
  doc["doc_types"] = json::array();
  for (const auto& t : meta.doc_types) {
    json j;
    j["name"] = t.name;
    j["required_sections"] = json::array();
    for (auto s : t.required_sections) j["required_sections"].push_back(to_string(s));
    j["title_patterns"] = json::array();
    for (const auto& p : t.title_patterns) j["title_patterns"].push_back(p.source());
    doc["doc_types"].push_back(std::move(j));
  }
  doc["section_heading_map"] = json::array();
  for (const auto& r : meta.section_heading_map)
    doc["section_heading_map"].push_back(
        {{"pattern", r.pattern.source()}, {"section_type", to_string(r.section_type)}});
  doc["constraint_entity_types"] = meta.constraint_entity_types;
  doc["entity_dictionary"] = json::array();
  for (const auto& e : meta.entity_dictionary)
    doc["entity_dictionary"].push_back({{"canonical", e.canonical},
                                        {"surface_forms", e.surface_forms},
                                        {"entity_type", e.entity_type}});
  doc["action_lexicon"] = meta.action_lexicon;
  doc["step_cue_lexicon"] = meta.step_cue_lexicon;
  doc["condition_markers"] = meta.condition_markers;
  doc["entity_linking_enabled"] = meta.entity_linking_enabled;
  if (meta.embedding_table) doc["embedding_table"] = *meta.embedding_table;
  return doc;
}

std::string normalize_heading(std::string_view heading) {
  auto s = text::to_lower(text::collapse_whitespace(heading));
  while (!s.empty() && (s.back() == ':' || s.back() == ' ')) s.pop_back();
  return s;
}

std::optional<int> match_step_cue(std::string_view s, const CorpusMeta& meta,
                                  std::size_t* token_len) {
  auto try_cue = [&](std::string_view cue) -> std::optional<int> {
    if (cue.empty() || !text::istarts_with(s, cue)) return std::nullopt;
    std::size_t i = cue.size();
    if (i < s.size() && text::is_word_char(s[i]) &&
        !std::isdigit(static_cast<unsigned char>(s[i])))
      return std::nullopt;
    while (i < s.size() && (s[i] == ' ' || s[i] == '#')) ++i;
    std::size_t digits = i;
    int value = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits])) &&
           digits - i < 6)
      value = value * 10 + (s[digits++] - '0');
    if (digits == i) return std::nullopt;
    if (digits < s.size() && text::is_word_char(s[digits])) return std::nullopt;
    if (token_len) *token_len = digits;
    return value;
  };
  if (auto v = try_cue("step")) return v;
  for (const auto& cue : meta.step_cue_lexicon)
    if (auto v = try_cue(cue)) return v;
  return std::nullopt;
}

std::optional<std::size_t> match_heading_rule(std::string_view heading,
                                              const CorpusMeta& meta) {
  const auto norm = normalize_heading(heading);
  for (std::size_t i = 0; i < meta.section_heading_map.size(); ++i)
    if (meta.section_heading_map[i].pattern.full_match(norm)) return i;
  return std::nullopt;
}

SectionType resolve_section_type(std::string_view heading, const CorpusMeta& meta) {
  auto idx = match_heading_rule(heading, meta);
  return idx ? meta.section_heading_map[*idx].section_type : SectionType::Other;
}

std::string resolve_doc_type(std::string_view title,
                             const std::set<SectionType>& present,
                             const CorpusMeta& meta) {
  const auto norm = text::collapse_whitespace(title);
  if (!norm.empty()) {
    for (const auto& doc_type : meta.doc_types)
      for (const auto& p : doc_type.title_patterns)
        if (p.search(norm)) return doc_type.name;
  }
  for (const auto& doc_type : meta.doc_types) {
    bool all = std::all_of(doc_type.required_sections.begin(), doc_type.required_sections.end(),
                           [&](SectionType t) { return present.count(t) > 0; });
    if (all) return doc_type.name;
  }
  return "unknown";
}

}  // namespace micrograph
