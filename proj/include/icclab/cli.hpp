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

// The icc-lab command line: icc, landscape, paths, svm-contour, sweep and
// train. Exit codes: 0 success, 1 parse or configuration error, 2 a
// degenerate input rejected by a contract, 3 partial failure.

#ifndef ICCLAB_CLI_HPP_
#define ICCLAB_CLI_HPP_

#include <iosfwd>

#include "icclab/error.hpp"

namespace icclab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 1;
inline constexpr int kExitDegenerate = 2;
inline constexpr int kExitPartial = 3;

int exit_code_for(ErrorCode code);

// Runs one invocation; argv[0] is the program name. Console output goes to
// `out` and `err` only.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace icclab

#endif  // ICCLAB_CLI_HPP_
