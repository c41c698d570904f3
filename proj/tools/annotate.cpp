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

#include "annotate.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "dkrm/dataset_io.hpp"
#include "dkrm/error.hpp"
#include "dkrm/rng.hpp"
#include "dkrm/scorer.hpp"

namespace dkrm::cli {

namespace {

std::string trim_lower(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

FeatureVector candidate_features(const nlohmann::json& c, const std::string& reviews,
                                 const FeatureSchema& schema, Scorer& scorer) {
  FeatureVector v;
  if (c.contains("features")) {
    v.values = c.at("features").get<std::vector<double>>();
  } else {
    if (!c.contains("text")) throw DataError("candidate has neither features nor text");
    if (reviews.empty()) throw DataError("scoring a candidate requires \"reviews\"");
    v = scorer.score(reviews, c.at("text").get<std::string>());
  }
  if (auto r = validate_feature_vector(v, schema); !r.ok()) throw DataError(r.to_string());
  return v;
}

}  // namespace

std::vector<AnnotationItem> load_annotation_source(const std::filesystem::path& path,
                                                   const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path.string());
  std::unique_ptr<Scorer> scorer;  // built on first use
  std::vector<AnnotationItem> items;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      AnnotationItem item;
      item.context_id = j.at("context_id").get<std::string>();
      if (item.context_id.empty()) throw DataError("empty context_id");
      if (!seen.insert(item.context_id).second) throw DataError("duplicate context_id");
      item.reviews = j.value("reviews", std::string());
      const auto& cands = j.at("candidates");
      if (!cands.is_array() || cands.size() != 2) {
        throw DataError("expected exactly 2 candidates");
      }
      if (!scorer) scorer = std::make_unique<Scorer>(ScorerConfig{}, schema);
      for (int k = 0; k < 2; ++k) {
        const auto& c = cands[k];
        CandidateRef ref;
        ref.candidate_id = c.at("candidate_id").get<std::string>();
        if (c.contains("text")) ref.text = c.at("text").get<std::string>();
        auto feats = candidate_features(c, item.reviews, schema, *scorer);
        if (k == 0) {
          item.first = std::move(ref);
          item.first_features = std::move(feats);
        } else {
          item.second = std::move(ref);
          item.second_features = std::move(feats);
        }
      }
      if (item.first.candidate_id == item.second.candidate_id) {
        throw DataError("candidates share an id");
      }
      items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    } catch (const Error& e) {
      throw DataError(where + e.what());
    }
  }
  if (items.empty()) throw DataError(path.string() + ": empty dataset");
  return items;
}

bool swap_presentation(std::uint64_t seed, const std::string& context_id) {
  // FNV-1a of the id keeps the order stable across resumed sessions.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : context_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  Rng rng(seed ^ h);
  return rng.below(2) == 1;
}

AnnotateSummary annotate(const AnnotateOptions& options, const FeatureSchema& schema,
                         std::istream& answers, std::ostream& out, std::ostream& log) {
  const auto items = load_annotation_source(options.source, schema);

  std::unordered_set<std::string> done;
  if (std::filesystem::exists(options.output)) {
    std::ifstream prev(options.output);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(prev, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        done.insert(parse_preference_line(line, schema).context_id);
      } catch (const Error& e) {
        throw DataError(options.output.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
      }
    }
  }

  std::ofstream sink(options.output, std::ios::app);
  if (!sink) throw DataError("cannot open output: " + options.output.string());

  AnnotateSummary summary;
  std::vector<const AnnotationItem*> todo;
  for (const auto& item : items) {
    if (done.count(item.context_id)) ++summary.already_done;
    else todo.push_back(&item);
  }

  auto show = [&](const char* label, const CandidateRef& ref, const FeatureVector& f) {
    out << "--- " << label << " ---\n";
    if (ref.text) out << *ref.text << '\n';
    for (std::size_t i = 0; i < schema.size(); ++i) {
      out << "  " << schema[i].name << ": " << format_number(f[i]) << '\n';
    }
  };

  for (std::size_t n = 0; n < todo.size(); ++n) {
    const auto& item = *todo[n];
    const bool swapped = swap_presentation(options.seed, item.context_id);
    const CandidateRef& a = swapped ? item.second : item.first;
    const CandidateRef& b = swapped ? item.first : item.second;
    const FeatureVector& fa = swapped ? item.second_features : item.first_features;
    const FeatureVector& fb = swapped ? item.first_features : item.second_features;

    ++summary.presented;
    out << "[" << (n + 1) << "/" << todo.size() << "] context " << item.context_id << '\n';
    if (!item.reviews.empty()) out << "Reviews:\n" << item.reviews << '\n';
    show("A", a, fa);
    show("B", b, fb);

    std::string choice;
    while (true) {
      out << "Prefer A or B? [a/b/skip/quit]: " << std::flush;
      std::string line;
      if (!std::getline(answers, line)) {
        out << '\n';
        return summary;
      }
      choice = trim_lower(line);
      if (choice == "a" || choice == "b" || choice == "skip" || choice == "s" ||
          choice == "quit" || choice == "q") {
        break;
      }
      out << "unrecognized answer '" << line << "'\n";
    }
    if (choice == "quit" || choice == "q") {
      summary.quit = true;
      return summary;
    }
    if (choice == "skip" || choice == "s") {
      ++summary.skipped;
      log << "skipped " << item.context_id << '\n';
      continue;
    }
    const bool a_wins = choice == "a";
    PreferencePair p;
    p.context_id = item.context_id;
    p.winner = a_wins ? a : b;
    p.loser = a_wins ? b : a;
    p.winner_features = a_wins ? fa : fb;
    p.loser_features = a_wins ? fb : fa;
    p.annotator_id = options.annotator_id;
    sink << serialize_preference(p) << '\n';
    sink.flush();
    ++summary.recorded;
  }
  return summary;
}

}  // namespace dkrm::cli
