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

#include "reflectolab/error.hpp"

namespace reflectolab {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidDomain: return "InvalidDomain";
    case ErrorCode::kAmbiguousProjection: return "AmbiguousProjection";
    case ErrorCode::kCenterSingular: return "CenterSingular";
    case ErrorCode::kNotPD: return "NotPD";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNotInwardPointing: return "NotInwardPointing";
    case ErrorCode::kHypothesesNotMet: return "HypothesesNotMet";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kSolverDiverged: return "SolverDiverged";
    case ErrorCode::kContractionViolated: return "ContractionViolated";
    case ErrorCode::kRayMisses: return "RayMisses";
    case ErrorCode::kIterationCap: return "IterationCap";
    case ErrorCode::kUnboundedWithoutBox: return "UnboundedWithoutBox";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kProjectionFailed: return "ProjectionFailed";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kHypothesisDiagnosticsFailed: return "HypothesisDiagnosticsFailed";
    case ErrorCode::kHittingConditionFailed: return "HittingConditionFailed";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSimulationFailed: return "SimulationFailed";
  }
  return "Unknown";
}

}  // namespace reflectolab
