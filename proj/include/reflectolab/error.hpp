// Copyright 2026 The Reflectolab Authors.
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

#ifndef REFLECTOLAB_ERROR_HPP_
#define REFLECTOLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace reflectolab {

// Numeric values are part of the C ABI (see reflectolab.h); append only.
enum class ErrorCode : int {
  kOk = 0,
  kDimensionMismatch = 1,
  kInvalidDomain = 2,
  kAmbiguousProjection = 3,
  kCenterSingular = 4,
  kNotPD = 5,
  kNotSymmetric = 6,
  kNotInwardPointing = 7,
  kHypothesesNotMet = 8,
  kUnsupported = 9,
  kSolverDiverged = 10,
  kContractionViolated = 11,
  kRayMisses = 12,
  kIterationCap = 13,
  kUnboundedWithoutBox = 14,
  kNotMonotone = 15,
  kProjectionFailed = 16,
  kNotFound = 17,
  kHypothesisDiagnosticsFailed = 18,
  kHittingConditionFailed = 19,
  kInvalidArgument = 20,
  kParseError = 21,
  kValidationError = 22,
  kIoError = 23,
  kSimulationFailed = 24,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace reflectolab

#endif  // REFLECTOLAB_ERROR_HPP_
