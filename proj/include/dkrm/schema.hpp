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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dkrm {

struct FeatureSpec {
  std::string name;
  double min = 0.0;
  double max = 5.0;

  double range() const { return max - min; }
};

/// Ordered list of bounded features. Construction validates names and
/// bounds and throws DataError on violation.
class FeatureSchema {
 public:
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  /// The seven opinion-summarization features, each scored on [0, 5].
  static const FeatureSchema& opinion_summarization();

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  std::span<const FeatureSpec> features() const { return features_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  double smallest_range() const;

  /// Affine map of raw values onto [0, 1] per feature bounds.
  void normalize(std::span<const double> raw, std::span<double> out) const;

  /// Hex SHA-256 over a canonical rendering of names and bounds.
  std::string fingerprint() const;

  bool operator==(const FeatureSchema& other) const;

 private:
  std::vector<FeatureSpec> features_;
};

struct FeatureVector {
  std::vector<double> values;

  FeatureVector() = default;
  explicit FeatureVector(std::vector<double> v) : values(std::move(v)) {}
  FeatureVector(std::initializer_list<double> v) : values(v) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::span<const double> span() const { return values; }

  bool operator==(const FeatureVector&) const = default;
};

struct Violation {
  // Empty for whole-vector problems such as a length mismatch.
  std::optional<std::size_t> feature_index;
  std::string reason;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationResult validate_feature_vector(const FeatureVector& v,
                                         const FeatureSchema& schema);

/// Compact decimal rendering used in diagnostics ("5", "0.25", "1e-06").
std::string format_number(double x);

}  // namespace dkrm
