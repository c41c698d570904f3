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

#include "cli.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "annotate.hpp"
#include "dkrm/baselines.hpp"
#include "dkrm/checkpoint.hpp"
#include "dkrm/dataset_io.hpp"
#include "dkrm/error.hpp"
#include "dkrm/eval.hpp"
#include "dkrm/influence.hpp"
#include "dkrm/policy.hpp"
#include "dkrm/scorer.hpp"
#include "dkrm/simd/kernels.hpp"
#include "dkrm/synth.hpp"
#include "dkrm/train.hpp"
#include "manifest.hpp"

namespace dkrm::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kDefaultLatentWeights = "0.20,0.18,0.12,0.08,0.10,0.25,0.07";

std::string fmt(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s.find_first_not_of(" \t") == std::string::npos) return out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(part);
  return out;
}

std::vector<std::size_t> parse_dims(const std::string& s, const char* flag) {
  std::vector<std::size_t> out;
  for (const auto& p : split_commas(s)) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(p, &used);
    } catch (const std::exception&) {
    }
    if (v <= 0 || used != p.size()) {
      throw UsageError(std::string(flag) + ": expected comma-separated positive integers, got '" +
                       s + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& p : split_commas(s)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != p.size()) {
      throw UsageError(std::string(flag) + ": expected comma-separated numbers, got '" + s + "'");
    }
    out.push_back(v);
  }
  return out;
}

FeatureSchema schema_from(const std::string& path) {
  return path.empty() ? FeatureSchema::opinion_summarization() : load_schema(path);
}

/// Effective option values of the global app and one subcommand.
ordered_json config_snapshot(const CLI::App& app, const CLI::App& sub) {
  ordered_json j = ordered_json::object();
  auto add = [&](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      if (o->get_lnames().empty()) continue;
      const std::string& name = o->get_lnames().front();
      if (name == "help" || name == "version" || name == "config" || name == "print-config") {
        continue;
      }
      std::string value;
      if (o->count() > 0) {
        const auto& r = o->results();
        for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + r[i];
      } else {
        value = o->get_default_str();
      }
      j[name] = value;
    }
  };
  add(app);
  add(sub);
  return j;
}

void write_with_manifest(RunManifest& manifest, const fs::path& primary,
                         const std::string& content) {
  write_text_file(primary, content);
  manifest.add_output(primary);
}

// --- option bundles -------------------------------------------------------------

struct Globals {
  std::size_t threads = 1;
  std::string kernel = "auto";
  bool print_config = false;
};

struct SynthGenOpts {
  std::size_t pairs = 0;
  std::size_t pools = 0;
  std::size_t per_tier = 3;
  double temperature = 0.0;
  std::string latent = "linear";
  std::string weights = kDefaultLatentWeights;
  std::string mlp_hidden = "16,16";
  std::uint64_t mlp_seed = 11;
  std::uint64_t seed = 0;
  std::string schema;
  std::string out;
};

struct ScoreOpts {
  std::string input;
  std::string contexts;
  std::string out;
  std::string backend = "rule-based";
  std::string endpoint;
  std::string templates_dir;
  std::string template_version;
  std::string cache;
  std::size_t max_parallel = 4;
  std::size_t retries = 2;
  std::string schema;
};

struct TrainRewardOpts {
  std::string data;
  std::string schema;
  std::string out = "reward.ckpt";
  std::string report;
  std::size_t batch_size = TrainConfig{}.batch_size;
  double lr = TrainConfig{}.learning_rate;
  double weight_decay = TrainConfig{}.weight_decay;
  double warmup = TrainConfig{}.warmup_fraction;
  std::size_t epochs = TrainConfig{}.total_epochs;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> init_seed;
  double holdout = TrainConfig{}.holdout_fraction;
  std::string hidden = "16,16";
  std::string activation = "tanh";
};

struct EvalRewardOpts {
  std::string model;
  std::string data;
  std::string out;
};

struct InfluenceOpts {
  std::string model;
  double delta = 0.1;
  std::size_t samples = 8192;
  std::size_t grid_points = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t width = 40;
};

struct DeriveOpts {
  std::string pools;
  std::string schema;
  std::string out;
  std::string pairing = "all-cross-tier";
  std::optional<std::size_t> max_pairs;
  std::uint64_t seed = 0;
};

struct TrainPolicyOpts {
  std::string pools;
  std::string reward;
  std::string out = "policy.ckpt";
  std::string report;
  double beta = 0.0;
  double lr = PolicyOptConfig{}.learning_rate;
  std::size_t epochs = PolicyOptConfig{}.epochs;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> init_seed;
  std::string variant = "exact";
  double epsilon = PolicyOptConfig{}.epsilon;
  std::size_t steps_per_epoch = 1;
  std::size_t pool_batch = 0;
  std::string hidden = "16,16";
  std::string activation = "tanh";
};

struct EvalPolicyOpts {
  std::string policy;
  std::string reward;
  std::string pools;
  std::optional<double> beta;
  std::string out;
};

struct WtlOpts {
  std::string rankings;
  std::string out;
};

struct KappaOpts {
  std::string table;
};

struct GapOpts {
  std::string data;
  std::string schema;
  std::string out;
};

struct AnnotateOpts {
  std::string source;
  std::string out;
  std::string annotator;
  std::uint64_t seed = 0;
  std::string batch_answers;
  std::string schema;
};

// --- commands -------------------------------------------------------------------

int cmd_synth_gen(const SynthGenOpts& o, RunManifest& m, std::ostream& out) {
  if ((o.pairs == 0) == (o.pools == 0)) {
    throw UsageError("synth-gen: give exactly one of --pairs or --pools");
  }
  const FeatureSchema schema = schema_from(o.schema);
  if (!o.schema.empty()) m.add_input(o.schema);
  LatentRewardSpec spec;
  if (o.latent == "linear") {
    spec = LatentRewardSpec::linear(parse_reals(o.weights, "--weights"), o.temperature);
  } else if (o.latent == "mlp") {
    spec = LatentRewardSpec::random_mlp(parse_dims(o.mlp_hidden, "--mlp-hidden"), o.mlp_seed,
                                        o.temperature);
  } else {
    throw UsageError("--latent must be linear or mlp");
  }
  const LatentReward latent(spec, schema);
  m.add_seed("seed", o.seed);
  if (o.latent == "mlp") m.add_seed("mlp_seed", o.mlp_seed);

  if (o.pairs > 0) {
    const auto pairs = sample_preferences(latent, o.pairs, o.seed);
    save_preference_dataset(o.out, pairs);
    out << "wrote " << pairs.size() << " preference pairs to " << o.out << '\n';
  } else {
    if (o.per_tier == 0) throw UsageError("--per-tier must be >= 1");
    const auto pools = gen_candidate_pools(latent, o.pools, o.per_tier, o.seed);
    save_candidate_pools(o.out, pools);
    out << "wrote " << pools.size() << " candidate pools to " << o.out << '\n';
  }
  m.add_output(o.out);
  const fs::path sidecar = o.out + ".latent.json";
  save_latent_spec(sidecar, spec);
  m.add_output(sidecar);
  m.write();
  return 0;
}

int cmd_score(const ScoreOpts& o, const Globals& g, RunManifest& m, std::ostream& out) {
  const FeatureSchema schema = schema_from(o.schema);
  ScorerConfig config;
  config.backend = parse_backend(o.backend);
  if (!o.endpoint.empty()) config.remote_endpoint = o.endpoint;
  config.template_version = o.template_version;
  if (!o.cache.empty()) config.cache_path = o.cache;
  config.max_parallel_requests = o.max_parallel;
  config.retry_limit = o.retries;
  config.threads = g.threads;
  if (config.backend == ScorerBackend::kRemote) {
    config.prompt_templates = default_prompt_templates(schema);
    if (!o.templates_dir.empty()) {
      for (std::size_t i = 0; i < schema.size(); ++i) {
        const fs::path p = fs::path(o.templates_dir) / (schema[i].name + ".txt");
        if (fs::exists(p)) config.prompt_templates[i] = read_text_file(p);
      }
    }
  }

  // Reviews per context.
  std::unordered_map<std::string, std::string> reviews;
  {
    std::ifstream in(o.contexts);
    if (!in) throw DataError("file not found: " + o.contexts);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        reviews[j.at("context_id").get<std::string>()] = j.at("reviews").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw DataError(o.contexts + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  m.add_input(o.contexts);

  std::ifstream in(o.input);
  if (!in) throw DataError("file not found: " + o.input);
  m.add_input(o.input);
  std::vector<nlohmann::json> docs;
  std::vector<ScoreItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = o.input + ":" + std::to_string(lineno) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      const auto ctx = j.at("context_id").get<std::string>();
      auto it = reviews.find(ctx);
      if (it == reviews.end()) throw DataError("no reviews for context " + ctx);
      for (const auto& c : j.at("candidates")) {
        items.push_back({it->second, c.at("text").get<std::string>()});
      }
      docs.push_back(std::move(j));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  if (docs.empty()) throw DataError(o.input + ": empty dataset");

  Scorer scorer(config, schema);
  const auto scores = scorer.score_batch(items);
  std::string text;
  std::size_t k = 0;
  for (auto& j : docs) {
    for (auto& c : j.at("candidates")) {
      c["features"] = scores[k++].values;
      if (!c.contains("sft_logprob")) c["sft_logprob"] = 0.0;
    }
    // Round-trip through the validating parser so the output is canonical.
    text += serialize_pool(parse_pool_line(j.dump(), schema)) + "\n";
  }
  write_with_manifest(m, o.out, text);
  if (config.cache_path) m.add_output(*config.cache_path);
  m.write();
  const auto st = scorer.stats();
  out << "scored " << items.size() << " candidates in " << docs.size() << " pools ("
      << st.remote_calls << " remote calls, " << st.cache_hits << " cache hits)\n";
  return 0;
}

int cmd_train_reward(const TrainRewardOpts& o, RunManifest& m, std::ostream& out) {
  const FeatureSchema schema = schema_from(o.schema);
  const auto data = load_preference_dataset(o.data, schema);
  m.add_input(o.data);
  if (!o.schema.empty()) m.add_input(o.schema);
  TrainConfig c;
  c.batch_size = o.batch_size;
  c.learning_rate = o.lr;
  c.weight_decay = o.weight_decay;
  c.warmup_fraction = o.warmup;
  c.total_epochs = o.epochs;
  c.seed = o.seed;
  c.holdout_fraction = o.holdout;
  c.hidden_dims = parse_dims(o.hidden, "--hidden");
  c.activation = parse_activation(o.activation);
  c.validate();
  const std::uint64_t init_seed = o.init_seed.value_or(o.seed);
  m.add_seed("seed", o.seed);
  m.add_seed("init_seed", init_seed);

  const auto result = train_reward(data, schema, c, init_seed);
  save_reward_checkpoint(o.out, result.model, c);
  m.add_output(o.out);
  const fs::path report = o.report.empty() ? o.out + ".report.csv" : o.report;
  write_text_file(report, result.report.to_csv());
  m.add_output(report);
  m.write();

  const auto& last = result.report.epochs.back();
  out << "trained on " << result.report.train_size << " pairs ("
      << result.report.holdout_size << " held out), " << result.report.steps << " steps\n";
  out << "final train loss " << fmt(last.train_loss) << '\n';
  if (last.holdout_accuracy) {
    out << "holdout loss " << fmt(*last.holdout_loss) << ", accuracy "
        << fmt(*last.holdout_accuracy, 4) << '\n';
  }
  out << "wrote " << o.out << '\n';
  return 0;
}

int cmd_eval_reward(const EvalRewardOpts& o, RunManifest& m, std::ostream& out) {
  const auto ckpt = load_reward_checkpoint(o.model);
  const auto data = load_preference_dataset(o.data, ckpt.model.schema);
  const double acc = preference_accuracy(ckpt.model, data);
  const double loss = elo_loss(ckpt.model, data);
  out << "pairs " << data.size() << '\n'
      << "accuracy " << fmt(acc) << '\n'
      << "elo_loss " << fmt(loss) << '\n';
  if (!o.out.empty()) {
    m.add_input(o.model);
    m.add_input(o.data);
    ordered_json j{{"pairs", data.size()}, {"accuracy", acc}, {"elo_loss", loss}};
    write_with_manifest(m, o.out, j.dump(2) + "\n");
    m.write();
  }
  return 0;
}

int cmd_influence(const InfluenceOpts& o, const Globals& g, RunManifest& m, std::ostream& out) {
  const auto ckpt = load_reward_checkpoint(o.model);
  InfluenceConfig c;
  c.delta = o.delta;
  c.sample_count = o.samples;
  c.seed = o.seed;
  c.threads = g.threads;
  if (o.grid_points > 0) {
    c.sampling = InfluenceConfig::Sampling::kFullGrid;
    c.points_per_axis = o.grid_points;
  }
  const auto report = feature_influence(ckpt.model, c);
  out << report.to_bar_chart(o.width);
  if (!o.out.empty()) {
    m.add_input(o.model);
    m.add_seed("seed", o.seed);
    write_with_manifest(m, o.out, report.to_csv());
    m.write();
  }
  return 0;
}

int cmd_derive(const DeriveOpts& o, RunManifest& m, std::ostream& out) {
  const FeatureSchema schema = schema_from(o.schema);
  const auto pools = load_candidate_pools(o.pools, schema);
  m.add_input(o.pools);
  ImplicitPairPolicy p;
  if (o.pairing == "all-cross-tier") {
    p.pairing = ImplicitPairPolicy::Pairing::kAllCrossTier;
  } else if (o.pairing == "adjacent-tier-only") {
    p.pairing = ImplicitPairPolicy::Pairing::kAdjacentTierOnly;
  } else {
    throw UsageError("--pairing must be all-cross-tier or adjacent-tier-only");
  }
  p.max_pairs_per_pool = o.max_pairs;
  p.seed = o.seed;
  m.add_seed("seed", o.seed);
  const auto pairs = derive_implicit_pairs(pools, p);
  if (pairs.empty()) throw DataError("no cross-tier pairs in " + o.pools);
  save_preference_dataset(o.out, pairs);
  m.add_output(o.out);
  m.write();
  out << "derived " << pairs.size() << " implicit pairs from " << pools.size() << " pools\n";
  return 0;
}

int cmd_train_policy(const TrainPolicyOpts& o, RunManifest& m, std::ostream& out) {
  const auto reward = load_reward_checkpoint(o.reward);
  const auto pools = load_candidate_pools(o.pools, reward.model.schema);
  m.add_input(o.pools);
  m.add_input(o.reward);
  PolicyOptConfig c;
  c.beta = o.beta;
  c.learning_rate = o.lr;
  c.epochs = o.epochs;
  c.seed = o.seed;
  c.variant = parse_variant(o.variant);
  c.epsilon = o.epsilon;
  c.steps_per_epoch = o.steps_per_epoch;
  c.pool_batch_size = o.pool_batch;
  c.hidden_dims = parse_dims(o.hidden, "--hidden");
  c.activation = parse_activation(o.activation);
  c.validate();
  const std::uint64_t init_seed = o.init_seed.value_or(o.seed);
  m.add_seed("seed", o.seed);
  m.add_seed("init_seed", init_seed);

  const auto result = train_policy(pools, reward.model, c, init_seed);
  save_policy_checkpoint(o.out, result.policy, c);
  m.add_output(o.out);
  const fs::path report = o.report.empty() ? o.out + ".report.csv" : o.report;
  write_text_file(report, result.report.to_csv());
  m.add_output(report);
  m.write();

  const auto metrics = evaluate_policy(result.policy, pools, reward.model, c.beta);
  out << "objective " << fmt(metrics.objective) << '\n'
      << "mean_reward " << fmt(metrics.mean_reward) << '\n'
      << "mean_kl " << fmt(metrics.mean_kl) << '\n'
      << "mean_argmax_prob " << fmt(metrics.mean_argmax_prob) << '\n'
      << "wrote " << o.out << '\n';
  return 0;
}

int cmd_eval_policy(const EvalPolicyOpts& o, RunManifest& m, std::ostream& out) {
  const auto policy = load_policy_checkpoint(o.policy);
  const auto reward = load_reward_checkpoint(o.reward);
  if (!(policy.policy.schema == reward.model.schema)) {
    throw DataError("pool/reward schema mismatch");
  }
  const auto pools = load_candidate_pools(o.pools, reward.model.schema);
  const double beta = o.beta.value_or(policy.config.beta);
  const auto r = evaluate_policy(policy.policy, pools, reward.model, beta);
  out << "pools " << pools.size() << '\n'
      << "beta " << format_number(beta) << '\n'
      << "objective " << fmt(r.objective) << '\n'
      << "mean_reward " << fmt(r.mean_reward) << '\n'
      << "mean_kl " << fmt(r.mean_kl) << '\n'
      << "mean_argmax_prob " << fmt(r.mean_argmax_prob) << '\n'
      << "min_argmax_prob " << fmt(r.min_argmax_prob) << '\n';
  if (!o.out.empty()) {
    m.add_input(o.policy);
    m.add_input(o.reward);
    m.add_input(o.pools);
    ordered_json j{{"pools", pools.size()},           {"beta", beta},
                   {"objective", r.objective},        {"mean_reward", r.mean_reward},
                   {"mean_kl", r.mean_kl},            {"mean_argmax_prob", r.mean_argmax_prob},
                   {"min_argmax_prob", r.min_argmax_prob}};
    write_with_manifest(m, o.out, j.dump(2) + "\n");
    m.write();
  }
  return 0;
}

int cmd_wtl(const WtlOpts& o, RunManifest& m, std::ostream& out) {
  const auto records = load_rankings(o.rankings);
  const auto matrix = pairwise_wtl(records);
  out << matrix.to_table();
  if (!o.out.empty()) {
    m.add_input(o.rankings);
    write_with_manifest(m, o.out, matrix.to_csv());
    m.write();
  }
  return 0;
}

int cmd_kappa(const KappaOpts& o, std::ostream& out) {
  const auto table = load_count_table(o.table);
  out << "items " << table.size() << '\n' << "kappa " << fmt(fleiss_kappa(table)) << '\n';
  return 0;
}

int cmd_gap(const GapOpts& o, RunManifest& m, std::ostream& out) {
  const FeatureSchema schema = schema_from(o.schema);
  const auto data = load_preference_dataset(o.data, schema);
  const auto gap = feature_gap_report(data);
  out << gap.to_table(schema);
  if (!o.out.empty()) {
    m.add_input(o.data);
    write_with_manifest(m, o.out, gap.to_csv(schema));
    m.write();
  }
  return 0;
}

int cmd_annotate(const AnnotateOpts& o, RunManifest& m, std::istream& in, std::ostream& out,
                 std::ostream& err) {
  const FeatureSchema schema = schema_from(o.schema);
  std::ifstream scripted;
  std::istream* answers = &in;
  if (!o.batch_answers.empty()) {
    scripted.open(o.batch_answers);
    if (!scripted) throw DataError("file not found: " + o.batch_answers);
    answers = &scripted;
  } else if (!isatty(STDIN_FILENO)) {
    throw UsageError("annotate needs an interactive terminal (use --batch-answers for scripted input)");
  }
  AnnotateOptions opts{o.source, o.out, o.annotator, o.seed};
  const auto s = annotate(opts, schema, *answers, out, err);
  m.add_input(o.source);
  m.add_seed("seed", o.seed);
  m.add_output(o.out);
  m.write();
  out << "presented " << s.presented << ", recorded " << s.recorded << ", skipped "
      << s.skipped << ", previously annotated " << s.already_done << '\n';
  return 0;
}

void apply_kernel(const std::string& name) {
  if (name == "auto") return;
  const auto isa = simd::parse_isa(name);
  if (!isa) throw UsageError("unknown kernel '" + name + "' (expected auto, scalar, avx2 or neon)");
  if (!simd::isa_available(*isa)) {
    throw UsageError("kernel '" + name + "' is not available on this machine");
  }
  simd::set_active_isa(*isa);
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Feature-based reward modelling toolkit", "dkrm"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", DKRM_VERSION);
  app.set_config("--config", "", "Read options from a TOML/INI file (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--threads", g.threads, "Worker threads for scoring and influence sampling")
      ->check(CLI::PositiveNumber);
  app.add_option("--kernel", g.kernel, "Compute kernel: auto, scalar, avx2 or neon");
  app.add_flag("--print-config", g.print_config,
               "Print the effective configuration and exit");

  SynthGenOpts sg;
  auto* c_sg = app.add_subcommand("synth-gen", "Generate synthetic preferences or candidate pools");
  c_sg->add_option("--pairs", sg.pairs, "Number of preference pairs to draw");
  c_sg->add_option("--pools", sg.pools, "Number of candidate pools to draw");
  c_sg->add_option("--per-tier", sg.per_tier, "Candidates per quality tier in each pool");
  c_sg->add_option("--temperature", sg.temperature, "Bradley-Terry label temperature (0 = noiseless)")
      ->check(CLI::NonNegativeNumber);
  c_sg->add_option("--latent", sg.latent, "Latent reward kind: linear or mlp");
  c_sg->add_option("--weights", sg.weights, "Linear latent weights, comma separated");
  c_sg->add_option("--mlp-hidden", sg.mlp_hidden, "Hidden widths of the random MLP latent");
  c_sg->add_option("--mlp-seed", sg.mlp_seed, "Seed of the random MLP latent");
  c_sg->add_option("--seed", sg.seed, "Sampling seed");
  c_sg->add_option("--schema", sg.schema, "Feature schema file (default: built-in 7 features)");
  c_sg->add_option("--out", sg.out, "Output JSONL")->required();

  ScoreOpts so;
  auto* c_score = app.add_subcommand("score", "Compute feature vectors for pool candidates");
  c_score->add_option("--input", so.input, "Pool JSONL whose candidates carry text")->required();
  c_score->add_option("--contexts", so.contexts, "JSONL of {context_id, reviews}")->required();
  c_score->add_option("--out", so.out, "Scored pool JSONL")->required();
  c_score->add_option("--backend", so.backend, "rule-based or remote");
  c_score->add_option("--endpoint", so.endpoint, "Remote judge URL (http://host:port/path)");
  c_score->add_option("--templates-dir", so.templates_dir,
                      "Directory of <feature>.txt prompt templates");
  c_score->add_option("--template-version", so.template_version,
                      "Cache version tag (default: derived from template text)");
  c_score->add_option("--cache", so.cache, "Score cache JSONL");
  c_score->add_option("--max-parallel", so.max_parallel, "Concurrent remote requests")
      ->check(CLI::PositiveNumber);
  c_score->add_option("--retries", so.retries, "Retries per remote request");
  c_score->add_option("--schema", so.schema, "Feature schema file");

  TrainRewardOpts tr;
  auto* c_tr = app.add_subcommand("train-reward", "Train a reward model on preference pairs");
  c_tr->add_option("--data", tr.data, "Preference JSONL")->required();
  c_tr->add_option("--schema", tr.schema, "Feature schema file");
  c_tr->add_option("--out", tr.out, "Checkpoint path");
  c_tr->add_option("--report", tr.report, "Training report CSV (default: <out>.report.csv)");
  c_tr->add_option("--batch-size", tr.batch_size, "Minibatch size");
  c_tr->add_option("--lr", tr.lr, "Peak learning rate");
  c_tr->add_option("--weight-decay", tr.weight_decay, "Decoupled weight decay");
  c_tr->add_option("--warmup", tr.warmup, "Warmup fraction of total steps");
  c_tr->add_option("--epochs", tr.epochs, "Training epochs");
  c_tr->add_option("--seed", tr.seed, "Shuffle and split seed");
  c_tr->add_option("--init-seed", tr.init_seed, "Initialization seed (default: --seed)");
  c_tr->add_option("--holdout", tr.holdout, "Held-out fraction");
  c_tr->add_option("--hidden", tr.hidden, "Hidden layer widths, comma separated");
  c_tr->add_option("--activation", tr.activation, "tanh or relu");

  EvalRewardOpts er;
  auto* c_er = app.add_subcommand("eval-reward", "Preference accuracy and loss of a reward model");
  c_er->add_option("--model", er.model, "Reward checkpoint")->required();
  c_er->add_option("--data", er.data, "Preference JSONL")->required();
  c_er->add_option("--out", er.out, "Metrics JSON");

  InfluenceOpts io;
  auto* c_inf = app.add_subcommand("analyze-influence", "Relative feature influence of a reward model");
  c_inf->add_option("--model", io.model, "Reward checkpoint")->required();
  c_inf->add_option("--delta", io.delta, "Finite-difference step");
  c_inf->add_option("--samples", io.samples, "Monte Carlo evaluation points");
  c_inf->add_option("--grid-points", io.grid_points,
                    "Use a full grid with this many points per axis instead of sampling");
  c_inf->add_option("--seed", io.seed, "Sampling seed");
  c_inf->add_option("--out", io.out, "Influence CSV");
  c_inf->add_option("--width", io.width, "Bar chart width");

  DeriveOpts dv;
  auto* c_dv = app.add_subcommand("derive-implicit", "Derive preference pairs from tiered pools");
  c_dv->add_option("--pools", dv.pools, "Pool JSONL")->required();
  c_dv->add_option("--schema", dv.schema, "Feature schema file");
  c_dv->add_option("--out", dv.out, "Preference JSONL")->required();
  c_dv->add_option("--pairing", dv.pairing, "all-cross-tier or adjacent-tier-only");
  c_dv->add_option("--max-pairs", dv.max_pairs, "Cap on pairs per pool")->check(CLI::PositiveNumber);
  c_dv->add_option("--seed", dv.seed, "Subsampling seed");

  TrainPolicyOpts tp;
  auto* c_tp = app.add_subcommand("train-policy", "Optimize a candidate-selection policy");
  c_tp->add_option("--pools", tp.pools, "Pool JSONL")->required();
  c_tp->add_option("--reward", tp.reward, "Reward checkpoint")->required();
  c_tp->add_option("--beta", tp.beta, "KL penalty coefficient")->required()->check(
      CLI::NonNegativeNumber);
  c_tp->add_option("--out", tp.out, "Policy checkpoint path");
  c_tp->add_option("--report", tp.report, "Training report CSV (default: <out>.report.csv)");
  c_tp->add_option("--lr", tp.lr, "Learning rate");
  c_tp->add_option("--epochs", tp.epochs, "Epochs");
  c_tp->add_option("--seed", tp.seed, "Minibatch seed");
  c_tp->add_option("--init-seed", tp.init_seed, "Initialization seed (default: --seed)");
  c_tp->add_option("--variant", tp.variant, "exact or clipped");
  c_tp->add_option("--epsilon", tp.epsilon, "Clip range for the clipped variant");
  c_tp->add_option("--steps-per-epoch", tp.steps_per_epoch, "Updates per old-policy snapshot");
  c_tp->add_option("--pool-batch", tp.pool_batch, "Pools per update (0 = all)");
  c_tp->add_option("--hidden", tp.hidden, "Hidden layer widths, comma separated");
  c_tp->add_option("--activation", tp.activation, "tanh or relu");

  EvalPolicyOpts ep;
  auto* c_ep = app.add_subcommand("eval-policy", "Objective, reward and KL of a trained policy");
  c_ep->add_option("--policy", ep.policy, "Policy checkpoint")->required();
  c_ep->add_option("--reward", ep.reward, "Reward checkpoint")->required();
  c_ep->add_option("--pools", ep.pools, "Pool JSONL")->required();
  c_ep->add_option("--beta", ep.beta, "KL coefficient (default: from the checkpoint)");
  c_ep->add_option("--out", ep.out, "Metrics JSON");

  WtlOpts wo;
  auto* c_wtl = app.add_subcommand("wtl", "Pairwise win/tie/loss matrix from rankings");
  c_wtl->add_option("--rankings", wo.rankings, "Rankings JSONL")->required();
  c_wtl->add_option("--out", wo.out, "Matrix CSV");

  KappaOpts ko;
  auto* c_kappa = app.add_subcommand("kappa", "Fleiss' kappa of a category count table");
  c_kappa->add_option("--table", ko.table, "CSV of per-item category counts")->required();

  GapOpts go;
  auto* c_gap = app.add_subcommand("feature-gap", "Mean features of winners versus losers");
  c_gap->add_option("--data", go.data, "Preference JSONL")->required();
  c_gap->add_option("--schema", go.schema, "Feature schema file");
  c_gap->add_option("--out", go.out, "Gap CSV");

  AnnotateOpts ao;
  auto* c_ann = app.add_subcommand("annotate", "Collect pairwise preferences in the terminal");
  c_ann->add_option("--source", ao.source, "JSONL of contexts with two candidates each")->required();
  c_ann->add_option("--out", ao.out, "Preference JSONL to append to")->required();
  c_ann->add_option("--annotator", ao.annotator, "Annotator id stored on each record")->required();
  c_ann->add_option("--seed", ao.seed, "Seed for the A/B presentation order");
  c_ann->add_option("--batch-answers", ao.batch_answers,
                    "Read answers (a, b, skip, quit) from this file instead of the terminal");
  c_ann->add_option("--schema", ao.schema, "Feature schema file");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (g.print_config) {
    out << app.config_to_str(true, false);
    return 0;
  }

  try {
    apply_kernel(g.kernel);
    RunManifest m(sub->get_name());
    m.set_config(config_snapshot(app, *sub));
    const std::string name = sub->get_name();
    if (name == "synth-gen") return cmd_synth_gen(sg, m, out);
    if (name == "score") return cmd_score(so, g, m, out);
    if (name == "train-reward") return cmd_train_reward(tr, m, out);
    if (name == "eval-reward") return cmd_eval_reward(er, m, out);
    if (name == "analyze-influence") return cmd_influence(io, g, m, out);
    if (name == "derive-implicit") return cmd_derive(dv, m, out);
    if (name == "train-policy") return cmd_train_policy(tp, m, out);
    if (name == "eval-policy") return cmd_eval_policy(ep, m, out);
    if (name == "wtl") return cmd_wtl(wo, m, out);
    if (name == "kappa") return cmd_kappa(ko, out);
    if (name == "feature-gap") return cmd_gap(go, m, out);
    if (name == "annotate") return cmd_annotate(ao, m, in, out, err);
    throw UsageError("unknown subcommand " + name);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kData);
  }
}

}  // namespace dkrm::cli
