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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dkrm/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace dkrm::simd {

namespace detail {

const KernelSet* avx2_kernels() {
#if defined(DKRM_HAVE_AVX2)
  static constexpr KernelSet k{Isa::kAvx2,      avx2::dot,        avx2::axpy,
                               avx2::gemv,      avx2::gemv_t_acc, avx2::ger_acc};
  return &k;
#else
  return nullptr;
#endif
}

const KernelSet* neon_kernels() {
#if defined(DKRM_HAVE_NEON)
  static constexpr KernelSet k{Isa::kNeon,      neon::dot,        neon::axpy,
                               neon::gemv,      neon::gemv_t_acc, neon::ger_acc};
  return &k;
#else
  return nullptr;
#endif
}

}  // namespace detail

namespace {

std::atomic<const KernelSet*> g_active{nullptr};

const KernelSet& initial_selection() {
  if (const char* env = std::getenv("DKRM_KERNEL"); env && *env) {
    const std::string_view name(env);
    if (name != "auto") {
      if (auto isa = parse_isa(name); isa && isa_available(*isa)) return kernels_for(*isa);
    }
  }
  return kernels_for(best_available_isa());
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "?";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  return std::nullopt;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(DKRM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(DKRM_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

Isa best_available_isa() {
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelSet& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
    case Isa::kAvx2: return *detail::avx2_kernels();
    case Isa::kNeon: return *detail::neon_kernels();
    case Isa::kScalar: break;
  }
  return detail::scalar_kernels();
}

const KernelSet& active_kernels() {
  const KernelSet* k = g_active.load(std::memory_order_acquire);
  if (k == nullptr) {
    const KernelSet* init = &initial_selection();
    g_active.compare_exchange_strong(k, init, std::memory_order_acq_rel);
    k = g_active.load(std::memory_order_acquire);
  }
  return *k;
}

void set_active_isa(Isa isa) { g_active.store(&kernels_for(isa), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace dkrm::simd
