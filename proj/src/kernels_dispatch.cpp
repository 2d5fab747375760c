// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <string>
#include <string_view>

#include "icclab/kernels.hpp"

namespace icclab::simd {

#if defined(ICCLAB_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(ICCLAB_HAVE_AVX2)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& select_kernels(std::string_view request) {
  if (request == "scalar") return scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

const KernelTable& kernels() {
  static const KernelTable& active = [] () -> const KernelTable& {
    const char* env = std::getenv("ICC_LAB_SIMD");
    return select_kernels(env ? std::string_view(env) : "auto");
  }();
  return active;
}

}  // namespace icclab::simd
