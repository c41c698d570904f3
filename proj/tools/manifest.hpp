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

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace dkrm::cli {

/// Provenance record written next to the primary output of a run.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  /// Records the input's sha256. Missing inputs are the caller's problem.
  void add_input(const std::filesystem::path& path);
  void add_seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }

  /// Writes <first output>.manifest.json and returns its path.
  std::filesystem::path write() const;

  nlohmann::ordered_json to_json() const;

 private:
  std::string command_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json seeds_ = nlohmann::ordered_json::object();
  std::vector<std::string> outputs_;
  std::string started_at_;
  std::chrono::steady_clock::time_point start_;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace dkrm::cli
