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

#include "dkrm/scorer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "httplib.h"
#include "json.hpp"

#include "dkrm/digest.hpp"
#include "dkrm/error.hpp"

namespace dkrm {

namespace {

// Small built-in lexicons. Aspect keywords map onto a canonical aspect so
// that "staff" and "service" count as the same aspect.
const std::unordered_map<std::string_view, std::string_view>& aspect_lexicon() {
  static const std::unordered_map<std::string_view, std::string_view> m = {
      {"battery", "battery"},   {"charge", "battery"},     {"charging", "battery"},
      {"screen", "display"},    {"display", "display"},    {"price", "price"},
      {"cost", "price"},        {"value", "price"},        {"quality", "quality"},
      {"build", "quality"},     {"material", "quality"},   {"materials", "quality"},
      {"service", "service"},   {"staff", "service"},      {"support", "service"},
      {"food", "food"},         {"meal", "food"},          {"meals", "food"},
      {"taste", "food"},        {"dish", "food"},          {"dishes", "food"},
      {"room", "room"},         {"rooms", "room"},         {"bed", "room"},
      {"bathroom", "room"},     {"location", "location"},  {"neighborhood", "location"},
      {"delivery", "delivery"}, {"shipping", "delivery"},  {"packaging", "delivery"},
      {"size", "size"},         {"fit", "size"},           {"sound", "sound"},
      {"audio", "sound"},       {"design", "design"},      {"style", "design"},
      {"performance", "performance"}, {"speed", "performance"},
      {"comfort", "comfort"},   {"camera", "camera"},      {"photos", "camera"},
      {"software", "software"}, {"app", "software"},       {"durability", "durability"},
  };
  return m;
}

const std::unordered_set<std::string_view>& positive_words() {
  static const std::unordered_set<std::string_view> s = {
      "good",     "great",     "excellent", "amazing",  "love",     "loved",      "loves",
      "nice",     "perfect",   "fast",      "friendly", "comfortable", "clean",  "helpful",
      "happy",    "best",      "awesome",   "fantastic", "recommend", "reliable", "sturdy",
      "beautiful", "tasty",    "delicious", "quiet",    "affordable", "solid",    "pleasant",
      "impressive", "works",   "worth",     "spacious", "crisp",    "bright",     "smooth"};
  return s;
}

const std::unordered_set<std::string_view>& negative_words() {
  static const std::unordered_set<std::string_view> s = {
      "bad",     "poor",     "terrible", "awful",     "slow",       "broken",   "broke",
      "dirty",   "rude",     "noisy",    "expensive", "hate",       "hated",    "worst",
      "disappointing", "disappointed", "flimsy", "uncomfortable", "horrible", "weak",
      "faulty",  "overpriced", "bland",  "problem",   "problems",   "issue",    "issues",
      "cramped", "dim",      "unhelpful", "defective", "cold",      "stale",    "useless"};
  return s;
}

const std::unordered_set<std::string_view>& negators() {
  static const std::unordered_set<std::string_view> s = {
      "not", "no", "never", "nothing", "hardly", "isn", "wasn", "don", "didn",
      "doesn", "aren", "weren", "cannot", "without", "nor", "neither"};
  return s;
}

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> s = {
      "a",     "an",    "the",   "and",   "or",    "but",   "if",    "then",  "so",
      "of",    "to",    "in",    "on",    "at",    "by",    "for",   "with",  "from",
      "as",    "is",    "are",   "was",   "were",  "be",    "been",  "being", "am",
      "it",    "its",   "this",  "that",  "these", "those", "there", "here",  "i",
      "me",    "my",    "we",    "our",   "you",   "your",  "he",    "she",   "they",
      "them",  "their", "his",   "her",   "him",   "us",    "do",    "does",  "did",
      "have",  "has",   "had",   "will",  "would", "can",   "could", "should", "may",
      "might", "must",  "very",  "really", "too",  "also",  "just",  "quite", "much",
      "more",  "most",  "some",  "any",   "all",   "each",  "every", "other", "than",
      "about", "into",  "over",  "after", "before", "while", "when", "what",  "which",
      "who",   "whom",  "how",   "why",   "where", "because", "only", "own",  "same",
      "such",  "both",  "few",   "s",     "t",     "d",     "ll",    "m",     "re",
      "ve",    "overall", "one", "get",   "got",   "out",   "up",    "again", "even",
      "still", "though", "although", "many", "lot", "lots", "bit",  "way",   "thing",
      "things", "people", "reviewers", "review", "reviews", "customers", "users"};
  return s;
}

bool is_content(std::string_view tok) { return tok.size() > 1 && !stopwords().count(tok); }

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?' || c == '\n' || c == ';') {
      if (cur.find_first_not_of(" \t\r") != std::string::npos) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (cur.find_first_not_of(" \t\r") != std::string::npos) out.push_back(cur);
  return out;
}

int sentence_polarity(const std::vector<std::string>& toks) {
  int sum = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    int s = 0;
    if (positive_words().count(toks[i])) s = 1;
    else if (negative_words().count(toks[i])) s = -1;
    if (s == 0) continue;
    for (std::size_t k = 1; k <= 3 && k <= i; ++k) {
      if (negators().count(toks[i - k])) {
        s = -s;
        break;
      }
    }
    sum += s;
  }
  return (sum > 0) - (sum < 0);
}

std::set<std::string> aspects_in(const std::vector<std::string>& toks) {
  std::set<std::string> out;
  for (const auto& t : toks) {
    if (auto a = aspect_of(t)) out.emplace(*a);
  }
  return out;
}

std::set<std::pair<std::string, int>> opinions_in(std::string_view text) {
  std::set<std::pair<std::string, int>> out;
  for (const auto& sent : split_sentences(text)) {
    const auto toks = tokenize(sent);
    const int pol = sentence_polarity(toks);
    if (pol == 0) continue;
    for (const auto& a : aspects_in(toks)) out.emplace(a, pol);
  }
  return out;
}

template <class Set>
double share(const Set& covered_from, const Set& of) {
  if (of.empty()) return 5.0;
  std::size_t hit = 0;
  for (const auto& x : of) hit += covered_from.count(x);
  return 5.0 * static_cast<double>(hit) / static_cast<double>(of.size());
}

std::size_t unbalanced_brackets(std::string_view text) {
  std::vector<char> stack;
  std::size_t bad = 0;
  for (char c : text) {
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (!stack.empty() && stack.back() == open) stack.pop_back();
      else ++bad;
    }
  }
  return bad + stack.size();
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double rule_value(const RuleScores& r, std::string_view name) {
  if (name == "aspect-coverage") return r.aspect_coverage;
  if (name == "opinion-faithfulness") return r.opinion_faithfulness;
  if (name == "opinion-coverage") return r.opinion_coverage;
  if (name == "conciseness") return r.conciseness;
  if (name == "relevance") return r.relevance;
  if (name == "hallucination") return r.hallucination;
  if (name == "language-correctness") return r.language_correctness;
  throw UsageError("rule-based scorer has no rule for feature '" + std::string(name) + "'");
}

}  // namespace

std::string_view backend_name(ScorerBackend b) {
  return b == ScorerBackend::kRemote ? "remote" : "rule-based";
}

ScorerBackend parse_backend(std::string_view name) {
  if (name == "rule-based" || name == "rule_based" || name == "rules") {
    return ScorerBackend::kRuleBased;
  }
  if (name == "remote") return ScorerBackend::kRemote;
  throw UsageError("unknown scorer backend '" + std::string(name) +
                   "' (expected rule-based or remote)");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_stopword(std::string_view token) { return stopwords().count(token) > 0; }

std::optional<std::string_view> aspect_of(std::string_view token) {
  const auto& m = aspect_lexicon();
  if (auto it = m.find(token); it != m.end()) return it->second;
  return std::nullopt;
}

RuleScores rule_based_scores(std::string_view context, std::string_view candidate) {
  if (blank(candidate)) throw DataError("empty candidate");
  RuleScores r;
  const auto ctx_toks = tokenize(context);
  const auto cand_toks = tokenize(candidate);

  r.aspect_coverage = share(aspects_in(cand_toks), aspects_in(ctx_toks));

  const auto ctx_ops = opinions_in(context);
  const auto cand_ops = opinions_in(candidate);
  r.opinion_coverage = share(cand_ops, ctx_ops);
  r.opinion_faithfulness = share(ctx_ops, cand_ops);

  const double words = static_cast<double>(cand_toks.size());
  const double target = static_cast<double>(kConcisenessTargetWords);
  r.conciseness = 5.0 * std::clamp(1.0 - std::abs(words - target) / target, 0.0, 1.0);

  std::unordered_set<std::string> ctx_content;
  for (const auto& t : ctx_toks) {
    if (is_content(t)) ctx_content.insert(t);
  }

  std::size_t sentences = 0, relevant = 0;
  for (const auto& sent : split_sentences(candidate)) {
    const auto toks = tokenize(sent);
    if (toks.empty()) continue;
    ++sentences;
    relevant += std::any_of(toks.begin(), toks.end(), [&](const std::string& t) {
      return is_content(t) && ctx_content.count(t);
    });
  }
  r.relevance = sentences == 0 ? 0.0
                               : 5.0 * static_cast<double>(relevant) /
                                     static_cast<double>(sentences);

  std::size_t content = 0, absent = 0;
  for (const auto& t : cand_toks) {
    if (!is_content(t)) continue;
    ++content;
    absent += ctx_content.count(t) == 0;
  }
  r.hallucination = content == 0 ? 5.0
                                 : 5.0 * (1.0 - static_cast<double>(absent) /
                                                    static_cast<double>(content));

  std::size_t repeats = 0;
  for (std::size_t i = 1; i < cand_toks.size(); ++i) repeats += cand_toks[i] == cand_toks[i - 1];
  r.language_correctness = std::max(
      0.0, 5.0 - static_cast<double>(unbalanced_brackets(candidate)) -
               0.5 * static_cast<double>(repeats));
  return r;
}

// --- prompts ------------------------------------------------------------------

std::string default_prompt_template() {
  return "You are grading a summary written from a set of customer reviews.\n\n"
         "Reviews:\n{reviews}\n\n"
         "Summary:\n{summary}\n\n"
         "Criterion: {feature_rubric}\n\n"
         "Answer with a single number and nothing else.\n";
}

std::vector<std::string> default_prompt_templates(const FeatureSchema& schema) {
  return std::vector<std::string>(schema.size(), default_prompt_template());
}

std::string feature_rubric(const FeatureSpec& f) {
  static const std::unordered_map<std::string_view, std::string_view> known = {
      {"aspect-coverage",
       "Share of the product aspects discussed in the reviews that the summary mentions."},
      {"opinion-faithfulness",
       "Whether every opinion stated in the summary is supported by the reviews."},
      {"opinion-coverage",
       "Share of the opinions expressed in the reviews that the summary conveys."},
      {"conciseness", "Whether the summary is brief and free of filler."},
      {"relevance", "Whether each sentence of the summary is about the reviewed item."},
      {"hallucination",
       "Absence of content not found in the reviews; higher means fewer invented claims."},
      {"language-correctness", "Grammar, spelling and fluency of the summary."},
  };
  char range[96];
  std::snprintf(range, sizeof range, " Score from %g (worst) to %g (best).", f.min, f.max);
  if (auto it = known.find(f.name); it != known.end()) return std::string(it->second) + range;
  return "Quality of the summary with respect to " + f.name + "." + range;
}

std::string render_prompt(std::string_view tmpl, std::string_view reviews,
                          std::string_view summary, std::string_view rubric) {
  std::string out;
  out.reserve(tmpl.size() + reviews.size() + summary.size() + rubric.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto rest = tmpl.substr(i);
      if (rest.starts_with("{reviews}")) {
        out += reviews;
        i += 9;
        continue;
      }
      if (rest.starts_with("{summary}")) {
        out += summary;
        i += 9;
        continue;
      }
      if (rest.starts_with("{feature_rubric}")) {
        out += rubric;
        i += 16;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

double parse_judge_reply(std::string_view reply, const FeatureSpec& feature) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i = 0; i < reply.size(); ++i) {
    const bool lead_dot = reply[i] == '.' && i + 1 < reply.size() && digit(reply[i + 1]);
    if (!digit(reply[i]) && !lead_dot) continue;
    std::size_t start = i;
    if (start > 0 && reply[start - 1] == '-') --start;
    std::size_t end = i;
    while (end < reply.size() && digit(reply[end])) ++end;
    if (end < reply.size() && reply[end] == '.') {
      ++end;
      while (end < reply.size() && digit(reply[end])) ++end;
    }
    const double v = std::stod(std::string(reply.substr(start, end - start)));
    return std::clamp(v, feature.min, feature.max);
  }
  throw RemoteError("unparseable judge reply for " + feature.name + ": no number found");
}

// --- cache --------------------------------------------------------------------

std::string score_cache_key(std::string_view feature, std::string_view context,
                            std::string_view candidate, std::string_view template_version) {
  std::string buf;
  buf.reserve(feature.size() + context.size() + candidate.size() + template_version.size() + 64);
  // Length prefixes keep the encoding injective.
  for (auto part : {feature, context, candidate, template_version}) {
    buf += std::to_string(part.size());
    buf += ':';
    buf += part;
  }
  return sha256_hex(buf);
}

ScoreCache::ScoreCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  std::string line;
  std::size_t lineno = 0;
  while (in && std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("value").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path_->string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  out_.open(*path_, std::ios::app);
  if (!out_) throw DataError("cannot open cache file: " + path_->string());
}

std::optional<double> ScoreCache::get(const std::string& key) const {
  std::shared_lock lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  return std::nullopt;
}

void ScoreCache::put(const std::string& key, std::string_view feature, double value) {
  std::unique_lock lock(mutex_);
  entries_[key] = value;
  if (out_.is_open()) {
    nlohmann::ordered_json j;
    j["key"] = key;
    j["feature"] = feature;
    j["value"] = value;
    j["timestamp"] = utc_timestamp();
    out_ << j.dump() << '\n';
    out_.flush();
  }
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

// --- scorer -------------------------------------------------------------------

void ScorerConfig::validate(const FeatureSchema& schema) const {
  if (max_parallel_requests == 0) throw UsageError("max_parallel_requests must be >= 1");
  if (threads == 0) throw UsageError("threads must be >= 1");
  if (backend == ScorerBackend::kRuleBased) {
    RuleScores probe;
    for (const auto& f : schema.features()) rule_value(probe, f.name);
    return;
  }
  if (!remote_endpoint || remote_endpoint->empty()) {
    throw UsageError("remote backend requires remote_endpoint");
  }
  if (!remote_endpoint->starts_with("http://")) {
    throw UsageError("remote_endpoint must be an http:// URL");
  }
  if (prompt_templates.size() != schema.size()) {
    throw UsageError("remote backend requires " + std::to_string(schema.size()) +
                     " prompt templates, got " + std::to_string(prompt_templates.size()));
  }
}

struct Scorer::Remote {
  std::string host_port;  // scheme://host:port for httplib
  std::string path;
  std::optional<std::string> api_key;
};

Scorer::Scorer(ScorerConfig config, FeatureSchema schema)
    : config_(std::move(config)), schema_(std::move(schema)) {
  config_.validate(schema_);
  cache_ = config_.cache_path ? std::make_unique<ScoreCache>(*config_.cache_path)
                              : std::make_unique<ScoreCache>();
  if (config_.backend == ScorerBackend::kRemote) {
    remote_ = std::make_unique<Remote>();
    const std::string& url = *config_.remote_endpoint;
    const auto slash = url.find('/', 7);
    remote_->host_port = url.substr(0, slash);
    remote_->path = slash == std::string::npos ? "/" : url.substr(slash);
    if (const char* key = std::getenv("DKRM_JUDGE_API_KEY"); key && *key) {
      remote_->api_key = key;
    }
  }
}

Scorer::~Scorer() = default;

ScorerStats Scorer::stats() const { return {remote_calls_.load(), cache_hits_.load()}; }

std::string Scorer::version_for(std::size_t feature) const {
  if (!config_.template_version.empty()) return config_.template_version;
  return sha256_hex(config_.prompt_templates[feature]).substr(0, 16);
}

FeatureVector Scorer::rule_vector(std::string_view context, std::string_view candidate) const {
  const RuleScores r = rule_based_scores(context, candidate);
  FeatureVector v;
  v.values.reserve(schema_.size());
  for (const auto& f : schema_.features()) {
    v.values.push_back(std::clamp(rule_value(r, f.name), f.min, f.max));
  }
  return v;
}

FeatureVector Scorer::score(std::string_view context, std::string_view candidate) {
  const ScoreItem item{std::string(context), std::string(candidate)};
  return score_batch(std::span<const ScoreItem>(&item, 1)).front();
}

std::vector<FeatureVector> Scorer::score_batch(std::span<const ScoreItem> items) {
  if (items.empty()) return {};
  if (config_.backend == ScorerBackend::kRemote) return remote_batch(items);

  std::vector<FeatureVector> out(items.size());
  std::vector<std::string> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < items.size();) {
      try {
        out[i] = rule_vector(items[i].context, items[i].candidate);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(config_.threads, items.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!errors[i].empty()) throw DataError("item " + std::to_string(i) + ": " + errors[i]);
  }
  return out;
}

std::vector<FeatureVector> Scorer::remote_batch(std::span<const ScoreItem> items) {
  const std::size_t d = schema_.size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (blank(items[i].candidate)) {
      throw DataError("item " + std::to_string(i) + ": empty candidate");
    }
  }

  struct Task {
    std::string key;
    std::size_t item;
    std::size_t feature;
  };
  std::vector<std::string> keys(items.size() * d);
  std::unordered_map<std::string, double> values;
  std::unordered_set<std::string> queued;
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t f = 0; f < d; ++f) {
      auto key = score_cache_key(schema_[f].name, items[i].context, items[i].candidate,
                                 version_for(f));
      keys[i * d + f] = key;
      if (values.count(key) || queued.count(key)) {
        ++cache_hits_;
        continue;
      }
      if (auto hit = cache_->get(key)) {
        ++cache_hits_;
        values.emplace(key, *hit);
        continue;
      }
      queued.insert(key);
      tasks.push_back({std::move(key), i, f});
    }
  }

  std::vector<std::optional<double>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto call = [&](httplib::Client& cli, const Task& t) {
    const auto& spec = schema_[t.feature];
    const std::string prompt =
        render_prompt(config_.prompt_templates[t.feature], items[t.item].context,
                      items[t.item].candidate, feature_rubric(spec));
    const std::string body = nlohmann::json{{"prompt", prompt}}.dump();
    httplib::Headers headers;
    if (remote_->api_key) headers.emplace("Authorization", "Bearer " + *remote_->api_key);
    std::string last_error;
    const std::size_t attempts = config_.retry_limit + 1;
    for (std::size_t a = 0; a < attempts; ++a) {
      if (a > 0) std::this_thread::sleep_for(config_.retry_backoff * a);
      ++remote_calls_;
      auto res = cli.Post(remote_->path, headers, body, "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP status " + std::to_string(res->status);
        continue;
      }
      try {
        return parse_judge_reply(res->body, spec);
      } catch (const RemoteError& e) {
        last_error = e.what();
      }
    }
    throw RemoteError("remote judge failed for feature " + spec.name + " after " +
                      std::to_string(attempts) + " attempt(s): " + last_error);
  };

  auto work = [&] {
    httplib::Client cli(remote_->host_port);
    const auto timeout = config_.request_timeout;
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    for (std::size_t k; !failed.load() && (k = next.fetch_add(1)) < tasks.size();) {
      try {
        const double v = call(cli, tasks[k]);
        results[k] = v;
        cache_->put(tasks[k].key, schema_[tasks[k].feature].name, v);
      } catch (const std::exception& e) {
        errors[k] = e.what();
        failed.store(true);
      }
    }
  };
  const std::size_t n_workers = std::min(config_.max_parallel_requests, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(work);
  if (n_workers > 0) work();
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (!errors[k].empty()) {
      throw RemoteError("item " + std::to_string(tasks[k].item) + ": " + errors[k]);
    }
  }
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (results[k]) values.emplace(tasks[k].key, *results[k]);
  }

  std::vector<FeatureVector> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out[i].values.resize(d);
    for (std::size_t f = 0; f < d; ++f) out[i].values[f] = values.at(keys[i * d + f]);
  }
  return out;
}

FeatureVector score(std::string_view context, std::string_view candidate,
                    const ScorerConfig& config, const FeatureSchema& schema) {
  Scorer s(config, schema);
  return s.score(context, candidate);
}

std::vector<FeatureVector> score_batch(std::span<const ScoreItem> items,
                                       const ScorerConfig& config, const FeatureSchema& schema) {
  Scorer s(config, schema);
  return s.score_batch(items);
}

}  // namespace dkrm
