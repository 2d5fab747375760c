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

#include "icclab/error.hpp"

namespace icclab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kImbalancedBatch: return "ImbalancedBatch";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kDegenerateDimension: return "DegenerateDimension";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kStartOutOfBounds: return "StartOutOfBounds";
    case ErrorCode::kDegenerateSplit: return "DegenerateSplit";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kOneClassOnly: return "OneClassOnly";
    case ErrorCode::kUnsupportedPrimitive: return "UnsupportedPrimitive";
    case ErrorCode::kNonScalarOutput: return "NonScalarOutput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace icclab
