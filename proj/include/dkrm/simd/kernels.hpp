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
#include <string_view>

namespace dkrm::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

// Dense-layer primitives over row-major double matrices. Every entry has a
// scalar reference form; vector forms must agree with it to rounding.
struct KernelSet {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + bias, W is rows x cols
  void (*gemv)(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols);
  // out += W^T d, W is rows x cols, d has rows entries, out has cols
  void (*gemv_t_acc)(const double* w, const double* d, double* out,
                     std::size_t rows, std::size_t cols);
  // G += alpha * d a^T, G is rows x cols
  void (*ger_acc)(double alpha, const double* d, const double* a, double* g,
                  std::size_t rows, std::size_t cols);
};

/// True when the ISA was compiled in and the running CPU supports it.
bool isa_available(Isa isa);
Isa best_available_isa();

/// Throws std::invalid_argument if the ISA is unavailable.
const KernelSet& kernels_for(Isa isa);

/// Process-wide selection. Defaults to DKRM_KERNEL from the environment
/// ("scalar", "avx2", "neon", "auto") or the best available ISA.
const KernelSet& active_kernels();
void set_active_isa(Isa isa);

// Span conveniences over the active set.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace detail {
const KernelSet& scalar_kernels();
const KernelSet* avx2_kernels();  // nullptr when not compiled in
const KernelSet* neon_kernels();
}  // namespace detail

}  // namespace dkrm::simd
