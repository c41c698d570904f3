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

#include "dkrm/mlp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "dkrm/error.hpp"
#include "dkrm/simd/kernels.hpp"

namespace dkrm {

std::string_view activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation parse_activation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "tanh") return Activation::kTanh;
  if (lower == "relu") return Activation::kRelu;
  throw DataError("unknown activation '" + std::string(name) + "'");
}

MlpWorkspace::MlpWorkspace(const Mlp& net) {
  const auto dims = net.dims();
  acts_.reserve(dims.size());
  std::size_t widest = 0;
  for (auto d : dims) {
    acts_.emplace_back(d, 0.0);
    widest = std::max(widest, d);
  }
  delta_.assign(widest, 0.0);
  delta_prev_.assign(widest, 0.0);
}

Mlp::Mlp(std::vector<std::size_t> dims, Activation hidden)
    : dims_(std::move(dims)), activation_(hidden) {
  if (dims_.size() < 2) throw DataError("network needs at least input and output dims");
  if (dims_.back() != 1) throw DataError("network output dim must be 1");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] == 0 || dims_[l + 1] == 0) throw DataError("layer dims must be positive");
    offsets_.push_back(total);
    total += dims_[l + 1] * dims_[l] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::glorot_uniform(std::vector<std::size_t> dims, Activation hidden, Rng& rng) {
  Mlp net(std::move(dims), hidden);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double fan_in = static_cast<double>(net.dims_[l]);
    const double fan_out = static_cast<double>(net.dims_[l + 1]);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : net.weights(l)) w = rng.uniform(-a, a);
  }
  return net;
}

std::span<double> Mlp::weights(std::size_t layer) {
  return std::span<double>(params_).subspan(weight_offset(layer),
                                            dims_[layer + 1] * dims_[layer]);
}
std::span<const double> Mlp::weights(std::size_t layer) const {
  return std::span<const double>(params_).subspan(weight_offset(layer),
                                                  dims_[layer + 1] * dims_[layer]);
}
std::span<double> Mlp::bias(std::size_t layer) {
  return std::span<double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}
std::span<const double> Mlp::bias(std::size_t layer) const {
  return std::span<const double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}

double Mlp::forward(std::span<const double> x, MlpWorkspace& ws) const {
  if (x.size() != dims_.front()) {
    throw DataError("dimension mismatch: network expects " + std::to_string(dims_.front()) +
                    " inputs, got " + std::to_string(x.size()));
  }
  const auto& k = simd::active_kernels();
  std::copy(x.begin(), x.end(), ws.acts_[0].begin());
  const std::size_t layers = layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    auto& out = ws.acts_[l + 1];
    k.gemv(weights(l).data(), ws.acts_[l].data(), bias(l).data(), out.data(),
           dims_[l + 1], dims_[l]);
    if (l + 1 < layers) {
      if (activation_ == Activation::kTanh) {
        for (double& v : out) v = std::tanh(v);
      } else {
        for (double& v : out) v = v > 0.0 ? v : 0.0;
      }
    }
  }
  return ws.acts_.back()[0];
}

double Mlp::forward(std::span<const double> x) const {
  MlpWorkspace ws(*this);
  return forward(x, ws);
}

void Mlp::backward(MlpWorkspace& ws, double dout, std::span<double> grad) const {
  const auto& k = simd::active_kernels();
  double* delta = ws.delta_.data();
  double* prev = ws.delta_prev_.data();
  delta[0] = dout;
  for (std::size_t l = layer_count(); l-- > 0;) {
    const std::size_t rows = dims_[l + 1];
    const std::size_t cols = dims_[l];
    k.ger_acc(1.0, delta, ws.acts_[l].data(), grad.data() + weight_offset(l), rows, cols);
    double* gb = grad.data() + bias_offset(l);
    for (std::size_t r = 0; r < rows; ++r) gb[r] += delta[r];
    if (l == 0) break;
    std::fill(prev, prev + cols, 0.0);
    k.gemv_t_acc(weights(l).data(), delta, prev, rows, cols);
    const auto& h = ws.acts_[l];
    if (activation_ == Activation::kTanh) {
      for (std::size_t j = 0; j < cols; ++j) prev[j] *= 1.0 - h[j] * h[j];
    } else {
      for (std::size_t j = 0; j < cols; ++j) prev[j] = h[j] > 0.0 ? prev[j] : 0.0;
    }
    std::swap(delta, prev);
  }
}

bool Mlp::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace dkrm
