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

#include "dkrm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dkrm/dataset_io.hpp"
#include "dkrm/error.hpp"
#include "dkrm/reward_model.hpp"
#include "dkrm/rng.hpp"
#include "json.hpp"

namespace dkrm {

LatentRewardSpec LatentRewardSpec::linear(std::vector<double> w, double temperature) {
  LatentRewardSpec s;
  s.kind = Kind::kLinear;
  s.weights = std::move(w);
  s.noise_temperature = temperature;
  return s;
}

LatentRewardSpec LatentRewardSpec::random_mlp(std::vector<std::size_t> hidden,
                                              std::uint64_t seed, double temperature) {
  LatentRewardSpec s;
  s.kind = Kind::kRandomMlp;
  s.hidden_dims = std::move(hidden);
  s.mlp_seed = seed;
  s.noise_temperature = temperature;
  return s;
}

LatentReward::LatentReward(LatentRewardSpec spec, const FeatureSchema& schema)
    : spec_(std::move(spec)), schema_(schema) {
  if (!(spec_.noise_temperature >= 0.0) || !std::isfinite(spec_.noise_temperature)) {
    throw DataError("latent reward temperature must be finite and >= 0");
  }
  if (spec_.kind == LatentRewardSpec::Kind::kLinear) {
    if (spec_.weights.size() != schema_.size()) {
      throw DataError("latent weights length " + std::to_string(spec_.weights.size()) +
                      " does not match schema size " + std::to_string(schema_.size()));
    }
    for (double w : spec_.weights) {
      if (!std::isfinite(w)) throw DataError("latent weights must be finite");
    }
  } else {
    std::vector<std::size_t> dims{schema_.size()};
    dims.insert(dims.end(), spec_.hidden_dims.begin(), spec_.hidden_dims.end());
    dims.push_back(1);
    Rng rng(spec_.mlp_seed);
    net_ = Mlp::glorot_uniform(std::move(dims), Activation::kTanh, rng);
    // Glorot leaves biases at zero; give hidden units offsets so the latent
    // function is not odd-symmetric about the domain center.
    for (std::size_t l = 0; l < net_->layer_count(); ++l) {
      for (double& b : net_->bias(l)) b = rng.uniform(-0.5, 0.5);
    }
  }
}

double LatentReward::operator()(std::span<const double> raw) const {
  if (raw.size() != schema_.size()) {
    throw DataError("dimension mismatch in latent reward");
  }
  if (spec_.kind == LatentRewardSpec::Kind::kLinear) {
    double s = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) s += spec_.weights[i] * raw[i];
    return s;
  }
  std::vector<double> x(raw.size());
  schema_.normalize(raw, x);
  return net_->forward(x);
}

double latent_reward(const LatentRewardSpec& spec, const FeatureSchema& schema,
                     const FeatureVector& features) {
  return LatentReward(spec, schema)(features);
}

FeatureVector sample_features(const FeatureSchema& schema, Rng& rng) {
  FeatureVector v;
  v.values.reserve(schema.size());
  for (const auto& f : schema.features()) v.values.push_back(rng.uniform(f.min, f.max));
  return v;
}

namespace {
std::string numbered(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%06zu", prefix, i);
  return buf;
}
}  // namespace

std::vector<PreferencePair> sample_preferences(const LatentReward& latent, std::size_t n,
                                               std::uint64_t seed) {
  Rng rng(seed);
  const double t = latent.spec().noise_temperature;
  std::vector<PreferencePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector a = sample_features(latent.schema(), rng);
    FeatureVector b = sample_features(latent.schema(), rng);
    const double ra = latent(a);
    const double rb = latent(b);
    bool a_wins;
    if (t == 0.0) {
      a_wins = ra >= rb;
    } else {
      a_wins = rng.uniform() < sigmoid((ra - rb) / t);
    }
    const std::string ctx = numbered("ctx-", i);
    PreferencePair p;
    p.context_id = ctx;
    CandidateRef ref_a{ctx + "-a", std::nullopt};
    CandidateRef ref_b{ctx + "-b", std::nullopt};
    if (a_wins) {
      p.winner = std::move(ref_a);
      p.loser = std::move(ref_b);
      p.winner_features = std::move(a);
      p.loser_features = std::move(b);
    } else {
      p.winner = std::move(ref_b);
      p.loser = std::move(ref_a);
      p.winner_features = std::move(b);
      p.loser_features = std::move(a);
    }
    p.annotator_id = "synthetic";
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<CandidatePool> gen_candidate_pools(const LatentReward& latent,
                                               std::size_t pool_count,
                                               std::size_t candidates_per_tier,
                                               std::uint64_t seed) {
  if (candidates_per_tier == 0) throw DataError("candidates_per_tier must be >= 1");
  Rng rng(seed);
  const std::size_t m = 3 * candidates_per_tier;
  std::vector<CandidatePool> pools;
  pools.reserve(pool_count);
  for (std::size_t p = 0; p < pool_count; ++p) {
    CandidatePool pool;
    pool.context_id = numbered("pool-", p);
    std::vector<double> rewards(m);
    for (std::size_t c = 0; c < m; ++c) {
      Candidate cand;
      cand.candidate_id = pool.context_id + "-c" + std::to_string(c);
      cand.features = sample_features(latent.schema(), rng);
      rewards[c] = latent(cand.features);
      pool.candidates.push_back(std::move(cand));
    }
    std::vector<std::size_t> rank(m);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return rewards[a] > rewards[b]; });
    for (std::size_t r = 0; r < m; ++r) {
      const Tier tier = r < candidates_per_tier       ? Tier::kGood
                        : r < 2 * candidates_per_tier ? Tier::kSBad
                                                      : Tier::kVBad;
      pool.candidates[rank[r]].tier = tier;
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

void save_latent_spec(const std::filesystem::path& path, const LatentRewardSpec& spec) {
  nlohmann::json j;
  j["noise_temperature"] = spec.noise_temperature;
  if (spec.kind == LatentRewardSpec::Kind::kLinear) {
    j["kind"] = "linear";
    j["weights"] = spec.weights;
  } else {
    j["kind"] = "random_mlp";
    j["hidden_dims"] = spec.hidden_dims;
    j["seed"] = spec.mlp_seed;
  }
  write_text_file(path, j.dump(2) + "\n");
}

LatentRewardSpec load_latent_spec(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    const double t = j.at("noise_temperature").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") return LatentRewardSpec::linear(j.at("weights").get<std::vector<double>>(), t);
    if (kind == "random_mlp") {
      return LatentRewardSpec::random_mlp(j.at("hidden_dims").get<std::vector<std::size_t>>(),
                                          j.at("seed").get<std::uint64_t>(), t);
    }
    throw DataError("unknown latent kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace dkrm
