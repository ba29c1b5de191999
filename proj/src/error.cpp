// Copyright 2026 The prefinfer Authors. All rights reserved.
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

#include "prefinfer/error.hpp"

namespace prefinfer {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnparseableRow: return "UnparseableRow";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kGapInSeries: return "GapInSeries";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNegativeInput: return "NegativeInput";
    case ErrorCode::kSteppedAfterTerminal: return "SteppedAfterTerminal";
    case ErrorCode::kZeroMax: return "ZeroMax";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kCorruptModel: return "CorruptModel";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kInvalidStep: return "InvalidStep";
    case ErrorCode::kDegenerateFeature: return "DegenerateFeature";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kWindowMismatch: return "WindowMismatch";
    case ErrorCode::kModelMissing: return "ModelMissing";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kArtifactMissing: return "ArtifactMissing";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

GapInSeries::GapInSeries(std::int64_t hour)
    : Error(ErrorCode::kGapInSeries, "no samples in hour " + std::to_string(hour)), hour_(hour) {}

UnparseableRow::UnparseableRow(std::size_t line, const std::string& detail)
    : Error(ErrorCode::kUnparseableRow, "line " + std::to_string(line) + ": " + detail),
      line_(line) {}

}  // namespace prefinfer
