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

#include <filesystem>
#include <string>
#include <vector>

#include "dkrm/records.hpp"
#include "dkrm/schema.hpp"

namespace dkrm {

// JSONL ingestion. Every loader validates each record against the schema and
// throws DataError with "<path>:<line>: <reason>" on the first bad record.
// Blank lines are skipped but still counted for line numbers.

std::vector<PreferencePair> load_preference_dataset(const std::filesystem::path& path,
                                                    const FeatureSchema& schema);
std::vector<CandidatePool> load_candidate_pools(const std::filesystem::path& path,
                                                const FeatureSchema& schema);

void save_preference_dataset(const std::filesystem::path& path,
                             const std::vector<PreferencePair>& pairs);
void save_candidate_pools(const std::filesystem::path& path,
                          const std::vector<CandidatePool>& pools);

// Single-record forms, used by the loaders and by the annotation flow.
PreferencePair parse_preference_line(const std::string& line, const FeatureSchema& schema);
std::string serialize_preference(const PreferencePair& pair);
CandidatePool parse_pool_line(const std::string& line, const FeatureSchema& schema);
std::string serialize_pool(const CandidatePool& pool);

// Schema file: {"features": [{"name": str, "min": real, "max": real}, ...]}
FeatureSchema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const FeatureSchema& schema);

/// Reads the whole file; throws DataError("file not found: <path>").
std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate then write.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace dkrm
