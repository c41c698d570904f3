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

#include "dkrm/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "dkrm/error.hpp"
#include "json.hpp"

namespace dkrm {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
  if (!obj.is_object()) throw DataError("record is not a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

double require_number(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number()) throw DataError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

FeatureVector parse_features(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_array()) throw DataError(std::string("field '") + key + "' must be an array");
  FeatureVector out;
  out.values.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw DataError(std::string("field '") + key + "' has a non-numeric entry");
    out.values.push_back(x.get<double>());
  }
  return out;
}

CandidateRef parse_ref(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  CandidateRef ref;
  ref.candidate_id = require_string(v, "candidate_id");
  ref.text = optional_string(v, "text");
  return ref;
}

json ref_to_json(const CandidateRef& ref) {
  json j = {{"candidate_id", ref.candidate_id}};
  if (ref.text) j["text"] = *ref.text;
  return j;
}

json parse_json_line(const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("parse failure: ") + e.what());
  }
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

template <typename T, typename Parse>
std::vector<T> load_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      out.push_back(parse(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw DataError(path.string() + ": empty dataset");
  return out;
}

template <typename T, typename Serialize>
void save_jsonl(const std::filesystem::path& path, const std::vector<T>& items,
                Serialize serialize) {
  std::string content;
  for (const auto& item : items) {
    content += serialize(item);
    content += '\n';
  }
  write_text_file(path, content);
}

}  // namespace

PreferencePair parse_preference_line(const std::string& line, const FeatureSchema& schema) {
  const json j = parse_json_line(line);
  PreferencePair p;
  p.context_id = require_string(j, "context_id");
  p.winner = parse_ref(j, "winner");
  p.loser = parse_ref(j, "loser");
  p.winner_features = parse_features(j, "winner_features");
  p.loser_features = parse_features(j, "loser_features");
  p.annotator_id = optional_string(j, "annotator_id");
  validate_pair(p, schema);
  return p;
}

std::string serialize_preference(const PreferencePair& p) {
  json j = {
      {"context_id", p.context_id},
      {"winner", ref_to_json(p.winner)},
      {"loser", ref_to_json(p.loser)},
      {"winner_features", p.winner_features.values},
      {"loser_features", p.loser_features.values},
  };
  if (p.annotator_id) j["annotator_id"] = *p.annotator_id;
  return j.dump();
}

CandidatePool parse_pool_line(const std::string& line, const FeatureSchema& schema) {
  const json j = parse_json_line(line);
  CandidatePool pool;
  pool.context_id = require_string(j, "context_id");
  const auto& cands = require(j, "candidates");
  if (!cands.is_array()) throw DataError("field 'candidates' must be an array");
  for (const auto& c : cands) {
    Candidate cand;
    cand.candidate_id = require_string(c, "candidate_id");
    cand.tier = parse_tier(require_string(c, "tier"));
    cand.features = parse_features(c, "features");
    cand.sft_logprob = require_number(c, "sft_logprob");
    cand.text = optional_string(c, "text");
    pool.candidates.push_back(std::move(cand));
  }
  validate_pool(pool, schema);
  return pool;
}

std::string serialize_pool(const CandidatePool& pool) {
  json cands = json::array();
  for (const auto& c : pool.candidates) {
    json jc = {
        {"candidate_id", c.candidate_id},
        {"tier", std::string(tier_name(c.tier))},
        {"features", c.features.values},
        {"sft_logprob", c.sft_logprob},
    };
    if (c.text) jc["text"] = *c.text;
    cands.push_back(std::move(jc));
  }
  return json{{"context_id", pool.context_id}, {"candidates", std::move(cands)}}.dump();
}

std::vector<PreferencePair> load_preference_dataset(const std::filesystem::path& path,
                                                    const FeatureSchema& schema) {
  return load_jsonl<PreferencePair>(
      path, [&](const std::string& line) { return parse_preference_line(line, schema); });
}

std::vector<CandidatePool> load_candidate_pools(const std::filesystem::path& path,
                                                const FeatureSchema& schema) {
  return load_jsonl<CandidatePool>(
      path, [&](const std::string& line) { return parse_pool_line(line, schema); });
}

void save_preference_dataset(const std::filesystem::path& path,
                             const std::vector<PreferencePair>& pairs) {
  save_jsonl(path, pairs, serialize_preference);
}

void save_candidate_pools(const std::filesystem::path& path,
                          const std::vector<CandidatePool>& pools) {
  save_jsonl(path, pools, serialize_pool);
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": parse failure: " + e.what());
  }
  try {
    const auto& feats = require(j, "features");
    if (!feats.is_array()) throw DataError("field 'features' must be an array");
    std::vector<FeatureSpec> specs;
    for (const auto& f : feats) {
      specs.push_back({require_string(f, "name"), require_number(f, "min"),
                       require_number(f, "max")});
    }
    return FeatureSchema(std::move(specs));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_schema(const std::filesystem::path& path, const FeatureSchema& schema) {
  json feats = json::array();
  for (const auto& f : schema.features()) {
    feats.push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
  }
  write_text_file(path, json{{"features", feats}}.dump(2) + "\n");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace dkrm
