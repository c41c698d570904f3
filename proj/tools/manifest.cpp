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

#include "manifest.hpp"

#include <ctime>
#include <stdexcept>

#include "dkrm/dataset_io.hpp"
#include "dkrm/digest.hpp"
#include "dkrm/simd/kernels.hpp"

namespace dkrm::cli {

namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), started_at_(utc_now()), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

nlohmann::ordered_json RunManifest::to_json() const {
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["tool_version"] = DKRM_VERSION;
  j["kernel"] = std::string(simd::isa_name(simd::active_kernels().isa));
  j["config"] = config_;
  j["inputs"] = inputs_;
  j["seeds"] = seeds_;
  j["outputs"] = outputs_;
  j["started_at"] = started_at_;
  j["wall_seconds"] = wall;
  return j;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

std::filesystem::path RunManifest::write() const {
  if (outputs_.empty()) throw std::logic_error("manifest without outputs");
  const auto path = manifest_path_for(outputs_.front());
  write_text_file(path, to_json().dump(2) + "\n");
  return path;
}

}  // namespace dkrm::cli
