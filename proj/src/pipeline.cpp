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

#include "micrograph/pipeline.hpp"

#include <memory>

namespace micrograph {
namespace {

void count(const Procedure& p, PageCounts& c) {
  ++c.procedures;
  for (const auto& s : p.steps) {
    ++c.steps;
    c.conditional_blocks += s.conditionals.size();
    for (const auto& n : s.nested) count(n, c);
  }
}

}  // namespace

PageCounts count_procedures(const std::vector<SectionContent>& contents) {
  PageCounts c;
  for (const auto& sc : contents)
    for (const auto& p : sc.procedures) count(p, c);
  return c;
}

PageResult process_page(std::string_view html, const CorpusMeta& meta,
                        const PipelineOptions& options, const std::string& fallback_url) {
  PageResult r;
  r.doc = parse_html(html);
  if (r.doc.truncated_at)
    r.diagnostics.push_back({"EncodingTruncated", "invalid UTF-8 at byte " +
                                                      std::to_string(*r.doc.truncated_at) +
                                                      "; the rest of the page was dropped"});
  r.outline = segment(r.doc, meta);
  if (!r.outline.source_url) r.outline.source_url = fallback_url;

  // Step typing consults the dictionary even when mention linking is off.
  const EntityLinker linker(meta);
  for (const auto& s : linker.ambiguous_surfaces())
    r.diagnostics.push_back({"AmbiguousSurface", "surface '" + s + "' maps to several canonicals"});
  std::unique_ptr<BaselineAnnotator> baseline;
  const Annotator* annotator = options.annotator;
  if (!annotator) {
    baseline = std::make_unique<BaselineAnnotator>(meta.condition_markers);
    annotator = baseline.get();
  }

  ExtractionContext ctx{meta, &linker, annotator, options.extraction, &r.diagnostics};
  for (const auto& section : r.outline.sections)
    r.contents.push_back(extract_section_content(section, r.doc, ctx));

  if (options.linking && meta.entity_linking_enabled) {
    for (const auto& unit : collect_text_units(r.outline, r.contents, meta)) {
      auto found = linker.link(r.doc.slice(unit.span), unit.span.start);
      r.mentions.insert(r.mentions.end(), found.begin(), found.end());
    }
  }

  r.graph = build_micrograph(r.outline, r.contents, r.mentions, meta);
  r.counts = count_procedures(r.contents);
  r.counts.mentions = r.mentions.size();
  return r;
}

}  // namespace micrograph
