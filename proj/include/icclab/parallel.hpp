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

#ifndef ICCLAB_PARALLEL_HPP_
#define ICCLAB_PARALLEL_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

namespace icclab {

// Worker count for independent jobs. 0 means "auto" (hardware concurrency).
struct Threads {
  unsigned count = 1;

  static Threads serial() { return {1}; }
  static Threads automatic();
  // "auto", "" or a positive integer. Throws kConfigError otherwise.
  static Threads parse(std::string_view text);
  // ICC_LAB_THREADS, or serial when the variable is unset.
  static Threads from_environment();
};

// Runs fn(i) for i in [0, n). Items are claimed dynamically, so fn must only
// write state owned by item i. After a failure no new items start; the
// exception of the lowest failing index is rethrown once all workers stop.
void parallel_for(std::size_t n, Threads threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace icclab

#endif  // ICCLAB_PARALLEL_HPP_
