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
#include <span>
#include <string_view>
#include <vector>

#include "dkrm/rng.hpp"

namespace dkrm {

enum class Activation { kTanh, kRelu };

std::string_view activation_name(Activation a);
/// Accepts "tanh" / "relu" in any case; throws DataError otherwise.
Activation parse_activation(std::string_view name);

class Mlp;

/// Per-thread scratch for forward/backward. Holds the activations of the
/// last forward pass, which backward() consumes.
class MlpWorkspace {
 public:
  explicit MlpWorkspace(const Mlp& net);

 private:
  friend class Mlp;
  std::vector<std::vector<double>> acts_;  // acts_[0] is the input
  std::vector<double> delta_;
  std::vector<double> delta_prev_;
};

/// Fully connected scalar-output network. Hidden layers use the configured
/// activation, the output layer is identity. Parameters live in one flat
/// buffer: for each layer, the row-major weight matrix (out x in) followed
/// by the bias vector. Gradients use the same layout.
class Mlp {
 public:
  /// Zero-initialized. dims = {input, hidden..., 1}.
  Mlp(std::vector<std::size_t> dims, Activation hidden);

  /// Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp glorot_uniform(std::vector<std::size_t> dims, Activation hidden, Rng& rng);

  std::span<const std::size_t> dims() const { return dims_; }
  Activation activation() const { return activation_; }
  std::size_t layer_count() const { return dims_.size() - 1; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  double forward(std::span<const double> x, MlpWorkspace& ws) const;
  double forward(std::span<const double> x) const;

  /// grad += dout * d(output)/d(params), using the activations stored in ws
  /// by the preceding forward() on the same input.
  void backward(MlpWorkspace& ws, double dout, std::span<double> grad) const;

  bool all_finite() const;

  bool operator==(const Mlp&) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + dims_[layer + 1] * dims_[layer];
  }

  std::vector<std::size_t> dims_;
  Activation activation_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace dkrm
