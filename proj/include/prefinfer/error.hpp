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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace prefinfer {

enum class ErrorCode {
  kMissingColumn,
  kUnparseableRow,
  kEmptyFile,
  kGapInSeries,
  kIndexOutOfRange,
  kNegativeInput,
  kSteppedAfterTerminal,
  kZeroMax,
  kShapeMismatch,
  kCorruptModel,
  kVersionMismatch,
  kInsufficientData,
  kInvalidStep,
  kDegenerateFeature,
  kUnknownScenario,
  kWindowMismatch,
  kModelMissing,
  kIoFailure,
  kConfigInvalid,
  kArtifactMissing,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library is an Error carrying a code, so callers
// (the CLI in particular) can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class GapInSeries : public Error {
 public:
  explicit GapInSeries(std::int64_t hour);

  // Epoch hour index (seconds / 3600) of the first hour without samples.
  std::int64_t hour() const noexcept { return hour_; }

 private:
  std::int64_t hour_;
};

class UnparseableRow : public Error {
 public:
  UnparseableRow(std::size_t line, const std::string& detail);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace prefinfer
