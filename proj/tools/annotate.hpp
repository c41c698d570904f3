// Copyright 2026 The dkrm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dkrm/records.hpp"
#include "dkrm/schema.hpp"

namespace dkrm::cli {

// Annotation source JSONL, one item per line:
//   {"context_id": str, "reviews"?: str,
//    "candidates": [{"candidate_id": str, "text"?: str, "features"?: [...]}, x2]}
// Candidates without features are scored with the rule-based scorer, which
// needs "reviews" and "text".
struct AnnotationItem {
  std::string context_id;
  std::string reviews;
  CandidateRef first;
  CandidateRef second;
  FeatureVector first_features;
  FeatureVector second_features;
};

std::vector<AnnotationItem> load_annotation_source(const std::filesystem::path& path,
                                                   const FeatureSchema& schema);

/// True when the pair is shown as (second, first) for this seed.
bool swap_presentation(std::uint64_t seed, const std::string& context_id);

struct AnnotateOptions {
  std::filesystem::path source;
  std::filesystem::path output;
  std::string annotator_id;
  std::uint64_t seed = 0;
};

struct AnnotateSummary {
  std::size_t already_done = 0;
  std::size_t presented = 0;
  std::size_t recorded = 0;
  std::size_t skipped = 0;
  bool quit = false;
};

/// Presents every source item whose context_id is not yet in the output
/// file, reading one answer per item from `answers` (a, b, skip or quit;
/// anything else re-prompts). Records are appended and flushed one at a
/// time so an interrupted session can resume. Stops at end of input.
AnnotateSummary annotate(const AnnotateOptions& options, const FeatureSchema& schema,
                         std::istream& answers, std::ostream& out, std::ostream& log);

}  // namespace dkrm::cli
