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

// Reference kernels. Straight loops in index order; these define the
// semantics the vector variants are tested against.

#include "dkrm/simd/kernels.hpp"

namespace dkrm::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, const double* x, const double* bias, double* y,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot_scalar(w + r * cols, x, cols);
  }
}

void gemv_t_acc_scalar(const double* w, const double* d, double* out,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(d[r], w + r * cols, out, cols);
}

void ger_acc_scalar(double alpha, const double* d, const double* a, double* g,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(alpha * d[r], a, g + r * cols, cols);
}

constexpr KernelSet kScalar{Isa::kScalar, dot_scalar,        axpy_scalar,
                            gemv_scalar,  gemv_t_acc_scalar, ger_acc_scalar};

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

}  // namespace dkrm::simd::detail
