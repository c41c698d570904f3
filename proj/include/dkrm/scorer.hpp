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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dkrm/schema.hpp"

namespace dkrm {

enum class ScorerBackend { kRuleBased, kRemote };

std::string_view backend_name(ScorerBackend b);
ScorerBackend parse_backend(std::string_view name);

struct ScorerConfig {
  ScorerBackend backend = ScorerBackend::kRuleBased;
  /// http://host[:port]/path
  std::optional<std::string> remote_endpoint;
  /// One template per schema feature, same order. Placeholders: {reviews},
  /// {summary}, {feature_rubric}.
  std::vector<std::string> prompt_templates;
  /// Mixed into cache keys. Empty means derive from the template text.
  std::string template_version;
  std::optional<std::filesystem::path> cache_path;
  std::size_t max_parallel_requests = 4;
  std::size_t retry_limit = 2;
  std::chrono::milliseconds request_timeout{30000};
  std::chrono::milliseconds retry_backoff{200};
  /// Workers for rule-based batch scoring.
  std::size_t threads = 1;

  /// Throws UsageError on an unusable configuration.
  void validate(const FeatureSchema& schema) const;
};

/// Generic judge template with the three placeholders.
std::string default_prompt_template();
std::vector<std::string> default_prompt_templates(const FeatureSchema& schema);
/// Short rubric text substituted for {feature_rubric}.
std::string feature_rubric(const FeatureSpec& feature);
/// Replaces every {reviews}, {summary} and {feature_rubric}.
std::string render_prompt(std::string_view tmpl, std::string_view reviews,
                          std::string_view summary, std::string_view rubric);
/// First decimal number in a judge reply, clamped into [min, max]. Throws
/// RemoteError when the reply holds no number.
double parse_judge_reply(std::string_view reply, const FeatureSpec& feature);

// --- rule-based scorer ------------------------------------------------------

/// Rule-based scores keyed by the default feature names. Every value lies
/// in [0, 5]. Throws DataError on an empty candidate.
struct RuleScores {
  double aspect_coverage = 0.0;
  double opinion_faithfulness = 0.0;
  double opinion_coverage = 0.0;
  double conciseness = 0.0;
  double relevance = 0.0;
  double hallucination = 0.0;
  double language_correctness = 0.0;
};

RuleScores rule_based_scores(std::string_view context, std::string_view candidate);

/// Lower-cased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view text);
bool is_stopword(std::string_view token);
/// Aspect name for a keyword, if the keyword belongs to the aspect lexicon.
std::optional<std::string_view> aspect_of(std::string_view token);

inline constexpr std::size_t kConcisenessTargetWords = 80;

// --- cache --------------------------------------------------------------------

/// sha256 over (feature name, context, candidate, template version).
std::string score_cache_key(std::string_view feature, std::string_view context,
                            std::string_view candidate, std::string_view template_version);

/// Append-only JSONL score cache. Lines are {"key", "feature", "value",
/// "timestamp"}; later lines win on duplicate keys. Safe for concurrent
/// lookups and inserts.
class ScoreCache {
 public:
  ScoreCache() = default;  // memory only
  explicit ScoreCache(std::filesystem::path path);

  std::optional<double> get(const std::string& key) const;
  void put(const std::string& key, std::string_view feature, double value);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, double> entries_;
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
};

// --- scorer -------------------------------------------------------------------

struct ScoreItem {
  std::string context;
  std::string candidate;
};

struct ScorerStats {
  std::size_t remote_calls = 0;  // HTTP requests issued, retries included
  std::size_t cache_hits = 0;
};

class Scorer {
 public:
  /// Validates the config and opens the cache file when configured. The
  /// remote backend reads a bearer token from DKRM_JUDGE_API_KEY.
  Scorer(ScorerConfig config, FeatureSchema schema);
  ~Scorer();
  Scorer(const Scorer&) = delete;
  Scorer& operator=(const Scorer&) = delete;

  FeatureVector score(std::string_view context, std::string_view candidate);

  /// Results follow input order. Identical (feature, context, candidate)
  /// requests are issued once. Failures throw with the lowest failing item
  /// index in the message.
  std::vector<FeatureVector> score_batch(std::span<const ScoreItem> items);

  ScorerStats stats() const;
  const ScorerConfig& config() const { return config_; }
  const FeatureSchema& schema() const { return schema_; }

 private:
  struct Remote;

  FeatureVector rule_vector(std::string_view context, std::string_view candidate) const;
  std::vector<FeatureVector> remote_batch(std::span<const ScoreItem> items);
  std::string version_for(std::size_t feature) const;

  ScorerConfig config_;
  FeatureSchema schema_;
  std::unique_ptr<ScoreCache> cache_;
  std::unique_ptr<Remote> remote_;
  std::atomic<std::size_t> remote_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

/// One-shot helpers that build a Scorer for the call.
FeatureVector score(std::string_view context, std::string_view candidate,
                    const ScorerConfig& config, const FeatureSchema& schema);
std::vector<FeatureVector> score_batch(std::span<const ScoreItem> items,
                                       const ScorerConfig& config, const FeatureSchema& schema);

}  // namespace dkrm
