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

// Raw entry points of the vector variants. Kept free of standard-library
// templates: the translation units defining these are built with ISA flags
// and must not emit inline code the linker could pick for other callers.

#include <cstddef>

namespace dkrm::simd::avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, const double* x, const double* bias, double* y,
          std::size_t rows, std::size_t cols);
void gemv_t_acc(const double* w, const double* d, double* out, std::size_t rows,
                std::size_t cols);
void ger_acc(double alpha, const double* d, const double* a, double* g,
             std::size_t rows, std::size_t cols);
}  // namespace dkrm::simd::avx2

namespace dkrm::simd::neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, const double* x, const double* bias, double* y,
          std::size_t rows, std::size_t cols);
void gemv_t_acc(const double* w, const double* d, double* out, std::size_t rows,
                std::size_t cols);
void ger_acc(double alpha, const double* d, const double* a, double* g,
             std::size_t rows, std::size_t cols);
}  // namespace dkrm::simd::neon
