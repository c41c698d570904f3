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

#include "dkrm/schema.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "dkrm/digest.hpp"
#include "dkrm/error.hpp"

namespace dkrm {

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  if (features_.empty()) throw DataError("schema has no features");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) {
      throw DataError("schema feature " + std::to_string(i) + " has an empty name");
    }
    if (!seen.insert(f.name).second) {
      throw DataError("schema feature name '" + f.name + "' is duplicated");
    }
    if (!std::isfinite(f.min) || !std::isfinite(f.max) || !(f.min < f.max)) {
      throw DataError("schema feature '" + f.name + "' needs finite min < max");
    }
  }
}

const FeatureSchema& FeatureSchema::opinion_summarization() {
  static const FeatureSchema schema({
      {"aspect-coverage", 0.0, 5.0},
      {"opinion-faithfulness", 0.0, 5.0},
      {"opinion-coverage", 0.0, 5.0},
      {"conciseness", 0.0, 5.0},
      {"relevance", 0.0, 5.0},
      {"hallucination", 0.0, 5.0},
      {"language-correctness", 0.0, 5.0},
  });
  return schema;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

double FeatureSchema::smallest_range() const {
  double r = features_.front().range();
  for (const auto& f : features_) r = std::min(r, f.range());
  return r;
}

void FeatureSchema::normalize(std::span<const double> raw, std::span<double> out) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    out[i] = (raw[i] - features_[i].min) / features_[i].range();
  }
}

std::string FeatureSchema::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& f : features_) os << f.name << '\t' << f.min << '\t' << f.max << '\n';
  return sha256_hex(os.str());
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
  if (features_.size() != other.features_.size()) return false;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& a = features_[i];
    const auto& b = other.features_[i];
    if (a.name != b.name || a.min != b.min || a.max != b.max) return false;
  }
  return true;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string ValidationResult::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    if (v.feature_index) out += "feature " + std::to_string(*v.feature_index) + ": ";
    out += v.reason;
  }
  return out;
}

ValidationResult validate_feature_vector(const FeatureVector& v,
                                         const FeatureSchema& schema) {
  ValidationResult result;
  if (v.size() != schema.size()) {
    result.violations.push_back(
        {std::nullopt, "length mismatch: expected " + std::to_string(schema.size()) +
                           ", got " + std::to_string(v.size())});
    return result;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    const auto& f = schema[i];
    if (!std::isfinite(x)) {
      result.violations.push_back({i, "non-finite value"});
    } else if (x > f.max) {
      result.violations.push_back({i, "exceeds max " + format_number(f.max)});
    } else if (x < f.min) {
      result.violations.push_back({i, "below min " + format_number(f.min)});
    }
  }
  return result;
}

}  // namespace dkrm
