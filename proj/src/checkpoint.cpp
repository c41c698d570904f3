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

#include "dkrm/checkpoint.hpp"

#include <algorithm>

#include "json.hpp"

#include "dkrm/dataset_io.hpp"
#include "dkrm/error.hpp"

namespace dkrm {

namespace {

using nlohmann::ordered_json;

constexpr const char* kFormat = "dkrm-checkpoint";
constexpr int kFormatVersion = 1;

ordered_json schema_json(const FeatureSchema& schema) {
  ordered_json feats = ordered_json::array();
  for (const auto& f : schema.features()) {
    feats.push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
  }
  return {{"features", feats}};
}

FeatureSchema schema_from(const ordered_json& j) {
  std::vector<FeatureSpec> specs;
  for (const auto& f : j.at("features")) {
    specs.push_back({f.at("name").get<std::string>(), f.at("min").get<double>(),
                     f.at("max").get<double>()});
  }
  return FeatureSchema(std::move(specs));
}

ordered_json train_config_obj(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"warmup_fraction", c.warmup_fraction},
          {"total_epochs", c.total_epochs},
          {"seed", c.seed},
          {"holdout_fraction", c.holdout_fraction},
          {"hidden_dims", c.hidden_dims},
          {"activation", std::string(activation_name(c.activation))}};
}

TrainConfig train_config_from(const ordered_json& j) {
  TrainConfig c;
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.warmup_fraction = j.at("warmup_fraction").get<double>();
  c.total_epochs = j.at("total_epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.holdout_fraction = j.at("holdout_fraction").get<double>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
  return c;
}

ordered_json policy_config_obj(const PolicyOptConfig& c) {
  return {{"beta", c.beta},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"objective_variant", std::string(variant_name(c.variant))},
          {"epsilon", c.epsilon},
          {"steps_per_epoch", c.steps_per_epoch},
          {"pool_batch_size", c.pool_batch_size},
          {"hidden_dims", c.hidden_dims},
          {"activation", std::string(activation_name(c.activation))}};
}

PolicyOptConfig policy_config_from(const ordered_json& j) {
  PolicyOptConfig c;
  c.beta = j.at("beta").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.variant = parse_variant(j.at("objective_variant").get<std::string>());
  c.epsilon = j.at("epsilon").get<double>();
  c.steps_per_epoch = j.at("steps_per_epoch").get<std::size_t>();
  c.pool_batch_size = j.at("pool_batch_size").get<std::size_t>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
  return c;
}

ordered_json network_obj(const char* kind, const FeatureSchema& schema, const Mlp& net) {
  ordered_json j;
  j["format"] = kFormat;
  j["format_version"] = kFormatVersion;
  j["kind"] = kind;
  j["layer_dims"] = std::vector<std::size_t>(net.dims().begin(), net.dims().end());
  j["activation"] = std::string(activation_name(net.activation()));
  j["parameters"] =
      std::vector<double>(net.parameters().begin(), net.parameters().end());
  j["schema"] = schema_json(schema);
  j["schema_fingerprint"] = schema.fingerprint();
  return j;
}

struct LoadedNetwork {
  ordered_json doc;
  FeatureSchema schema;
  Mlp net;
};

LoadedNetwork load_network(const std::filesystem::path& path, const char* expected_kind) {
  const std::string text = read_text_file(path);
  const std::string where = path.string() + ": ";
  try {
    auto doc = ordered_json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) {
      throw DataError("not a dkrm checkpoint");
    }
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw DataError("unsupported checkpoint version");
    }
    const auto kind = doc.at("kind").get<std::string>();
    if (kind != expected_kind) {
      throw DataError("expected a " + std::string(expected_kind) + " checkpoint, found " + kind);
    }
    FeatureSchema schema = schema_from(doc.at("schema"));
    if (schema.fingerprint() != doc.at("schema_fingerprint").get<std::string>()) {
      throw DataError("schema fingerprint mismatch");
    }
    Mlp net(doc.at("layer_dims").get<std::vector<std::size_t>>(),
            parse_activation(doc.at("activation").get<std::string>()));
    const auto params = doc.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameter_count()) {
      throw DataError("parameter count " + std::to_string(params.size()) + " does not match " +
                      std::to_string(net.parameter_count()));
    }
    std::copy(params.begin(), params.end(), net.parameters().begin());
    if (!net.all_finite()) throw DataError("non-finite parameters");
    return {std::move(doc), std::move(schema), std::move(net)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + e.what());
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(where + e.what());
  }
}

}  // namespace

std::string train_config_json(const TrainConfig& config) {
  return train_config_obj(config).dump();
}

std::string policy_config_json(const PolicyOptConfig& config) {
  return policy_config_obj(config).dump();
}

void save_reward_checkpoint(const std::filesystem::path& path, const RewardModel& model,
                            const std::optional<TrainConfig>& config) {
  auto j = network_obj("reward", model.schema, model.net);
  j["train_config"] = config ? train_config_obj(*config) : ordered_json(nullptr);
  write_text_file(path, j.dump(2) + "\n");
}

RewardCheckpoint load_reward_checkpoint(const std::filesystem::path& path) {
  auto loaded = load_network(path, "reward");
  std::optional<TrainConfig> config;
  try {
    const auto& tc = loaded.doc.at("train_config");
    if (!tc.is_null()) config = train_config_from(tc);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  try {
    return {RewardModel(std::move(loaded.schema), std::move(loaded.net)), config};
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_policy_checkpoint(const std::filesystem::path& path, const PolicySelector& policy,
                            const PolicyOptConfig& config) {
  auto j = network_obj("policy", policy.schema, policy.net);
  j["beta"] = config.beta;
  j["objective_variant"] = std::string(variant_name(config.variant));
  j["epsilon"] = config.epsilon;
  j["train_config"] = policy_config_obj(config);
  write_text_file(path, j.dump(2) + "\n");
}

PolicyCheckpoint load_policy_checkpoint(const std::filesystem::path& path) {
  auto loaded = load_network(path, "policy");
  try {
    auto config = policy_config_from(loaded.doc.at("train_config"));
    config.beta = loaded.doc.at("beta").get<double>();
    config.variant = parse_variant(loaded.doc.at("objective_variant").get<std::string>());
    config.epsilon = loaded.doc.at("epsilon").get<double>();
    return {PolicySelector(std::move(loaded.schema), std::move(loaded.net)), config};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace dkrm
