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

#ifndef ICCLAB_ERROR_HPP_
#define ICCLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace icclab {

enum class ErrorCode {
  kImbalancedBatch,
  kDegenerateClass,
  kDegenerateDimension,
  kZeroDenominator,
  kZeroVector,
  kNoPositives,
  kStartOutOfBounds,
  kDegenerateSplit,
  kDivergedLoss,
  kOneClassOnly,
  kUnsupportedPrimitive,
  kNonScalarOutput,
  kParseError,
  kConfigError,
  kInvalidArgument,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace icclab

#endif  // ICCLAB_ERROR_HPP_
