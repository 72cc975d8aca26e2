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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "micrograph/condition_extractor.hpp"
#include "micrograph/corpus_meta.hpp"
#include "micrograph/entity_linker.hpp"
#include "micrograph/html_model.hpp"
#include "micrograph/micrograph_builder.hpp"
#include "micrograph/procedure_extractor.hpp"
#include "micrograph/section_segmenter.hpp"

namespace micrograph {

struct PipelineOptions {
  ExtractionOptions extraction;
  // Mentions are linked only when this and meta.entity_linking_enabled hold.
  bool linking = true;
  // Null selects a BaselineAnnotator over the meta's condition markers.
  const Annotator* annotator = nullptr;
};

struct PageCounts {
  std::size_t procedures = 0;  // nested ones included
  std::size_t steps = 0;
  std::size_t conditional_blocks = 0;
  std::size_t mentions = 0;
};

struct PageResult {
  DomDocument doc;
  DocumentOutline outline;
  std::vector<SectionContent> contents;  // parallel to outline.sections
  std::vector<Mention> mentions;
  Micrograph graph;
  std::vector<Diagnostic> diagnostics;
  PageCounts counts;
};

// HTML bytes to micrograph. `fallback_url` names the page when it carries
// no canonical URL. Throws the parse, segmentation and build errors.
PageResult process_page(std::string_view html, const CorpusMeta& meta,
                        const PipelineOptions& options, const std::string& fallback_url);

PageCounts count_procedures(const std::vector<SectionContent>& contents);

}  // namespace micrograph
