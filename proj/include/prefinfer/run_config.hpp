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
#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "prefinfer/agent.hpp"
#include "prefinfer/datahub.hpp"
#include "prefinfer/dwpi.hpp"
#include "prefinfer/env.hpp"

namespace prefinfer {

struct CsvSource {
  std::filesystem::path path;
  ColumnSpec columns;
};

struct DataSource {
  enum class Kind { kSynthetic, kCsv };
  Kind kind = Kind::kSynthetic;
  // Synthetic: generator seeds; 0 means "derive from the master seed".
  std::uint64_t train_seed = 0;
  std::uint64_t eval_seed = 0;
  // CSV: the 7-day evaluation window is the first week of the aligned data
  // and the training window is day `train_day` of that week.
  CsvSource price;
  CsvSource renewable;
  CsvSource background;
  int train_day = 0;
};

// Sub-streams of the master seed, one per pipeline stage.
enum class SeedStream : std::uint64_t {
  kTrainData = 1,
  kEvalData = 2,
  kAgent = 3,
  kDwpi = 4,
  kComparison = 5,
};

struct RunConfig {
  std::uint64_t seed = 42;
  DataSource data;
  EnvConfig env;
  AgentHyper agent;
  DwpiHyper dwpi;
  double grid_step = 0.01;
  // Start each comparison agent from the trained weight-conditioned network
  // instead of a fresh initialization.
  bool comparison_warm_start = true;
  std::string out_dir = "prefinfer_out";

  // Validates every nested section; throws kConfigInvalid.
  void validate() const;
  std::uint64_t stage_seed(SeedStream stream) const;
};

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& config);

struct Windows {
  DataWindow train;  // one day
  DataWindow eval;   // seven days
};

Windows prepare_windows(const RunConfig& config);

}  // namespace prefinfer
