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

#include "dkrm/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dkrm {

AdamW::AdamW(std::size_t parameter_count, Options opts)
    : opts_(opts), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grad, double lr) {
  ++t_;
  const double b1 = opts_.beta1;
  const double b2 = opts_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double decay = 1.0 - lr * opts_.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] = params[i] * decay - lr * m_hat / (std::sqrt(v_hat) + opts_.eps);
  }
}

WarmupCosineSchedule::WarmupCosineSchedule(double base_lr, std::size_t total_steps,
                                           std::size_t warmup_steps)
    : base_(base_lr), total_(std::max<std::size_t>(total_steps, 1)),
      warmup_(std::min(warmup_steps, total_steps)) {}

double WarmupCosineSchedule::at(std::size_t step) const {
  if (step < warmup_) {
    return base_ * static_cast<double>(step + 1) / static_cast<double>(warmup_);
  }
  const std::size_t decay_steps = total_ - warmup_;
  if (decay_steps == 0) return base_;
  const double progress =
      std::min(1.0, static_cast<double>(step - warmup_) / static_cast<double>(decay_steps));
  return base_ * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace dkrm
