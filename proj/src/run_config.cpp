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

#include "prefinfer/run_config.hpp"

#include <fstream>

#include "prefinfer/error.hpp"
#include "prefinfer/random.hpp"

namespace prefinfer {
namespace {

constexpr int kEvalDays = 7;

nlohmann::json csv_source_json(const CsvSource& s) {
  return {{"path", s.path.string()}, {"timestamp_column", s.columns.timestamp}, {"value_column", s.columns.value}};
}

CsvSource csv_source_from(const nlohmann::json& j) {
  CsvSource s;
  s.path = j.at("path").get<std::string>();
  s.columns.timestamp = j.value("timestamp_column", s.columns.timestamp);
  s.columns.value = j.value("value_column", s.columns.value);
  return s;
}

HourlySeries load_hourly(const CsvSource& s) { return hourly_average(parse_csv(s.path, s.columns)); }

}  // namespace

void RunConfig::validate() const {
  env.validate();
  agent.validate();
  dwpi.validate();
  try {
    weight_grid(grid_step);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("grid_step: ") + e.what());
  }
  if (out_dir.empty()) throw Error(ErrorCode::kConfigInvalid, "out_dir must not be empty");
  if (data.kind == DataSource::Kind::kCsv) {
    for (const CsvSource* s : {&data.price, &data.renewable, &data.background}) {
      if (s->path.empty()) throw Error(ErrorCode::kConfigInvalid, "csv data source needs three paths");
    }
    if (data.train_day < 0 || data.train_day >= kEvalDays) {
      throw Error(ErrorCode::kConfigInvalid, "train_day must lie in the evaluation week");
    }
  }
}

std::uint64_t RunConfig::stage_seed(SeedStream stream) const {
  if (stream == SeedStream::kTrainData && data.train_seed != 0) return data.train_seed;
  if (stream == SeedStream::kEvalData && data.eval_seed != 0) return data.eval_seed;
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json data;
  if (c.data.kind == DataSource::Kind::kSynthetic) {
    data = {{"source", "synthetic"}, {"train_seed", c.data.train_seed}, {"eval_seed", c.data.eval_seed}};
  } else {
    data = {{"source", "csv"},
            {"price", csv_source_json(c.data.price)},
            {"renewable", csv_source_json(c.data.renewable)},
            {"background", csv_source_json(c.data.background)},
            {"train_day", c.data.train_day}};
  }
  return {{"schema_version", 1},
          {"seed", c.seed},
          {"data", data},
          {"env", env_config_to_json(c.env)},
          {"agent", agent_hyper_to_json(c.agent)},
          {"dwpi", dwpi_hyper_to_json(c.dwpi)},
          {"grid_step", c.grid_step},
          {"comparison_warm_start", c.comparison_warm_start},
          {"out_dir", c.out_dir}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "config must be a JSON object");
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      const std::string source = d.value("source", std::string("synthetic"));
      if (source == "synthetic") {
        c.data.kind = DataSource::Kind::kSynthetic;
        c.data.train_seed = d.value("train_seed", std::uint64_t{0});
        c.data.eval_seed = d.value("eval_seed", std::uint64_t{0});
      } else if (source == "csv") {
        c.data.kind = DataSource::Kind::kCsv;
        c.data.price = csv_source_from(d.at("price"));
        c.data.renewable = csv_source_from(d.at("renewable"));
        c.data.background = csv_source_from(d.at("background"));
        c.data.train_day = d.value("train_day", 0);
      } else {
        throw Error(ErrorCode::kConfigInvalid, "unknown data source '" + source + "'");
      }
    }
    if (j.contains("env")) c.env = env_config_from_json(j.at("env"));
    if (j.contains("agent")) c.agent = agent_hyper_from_json(j.at("agent"));
    if (j.contains("dwpi")) c.dwpi = dwpi_hyper_from_json(j.at("dwpi"));
    c.grid_step = j.value("grid_step", c.grid_step);
    c.comparison_warm_start = j.value("comparison_warm_start", c.comparison_warm_start);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read config " + path.string());
  try {
    return run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, path.string() + ": " + e.what());
  }
}

void save_run_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << run_config_to_json(config).dump(2) << '\n';
}

Windows prepare_windows(const RunConfig& config) {
  if (config.data.kind == DataSource::Kind::kSynthetic) {
    return {synthesize(config.stage_seed(SeedStream::kTrainData), 1),
            synthesize(config.stage_seed(SeedStream::kEvalData), kEvalDays)};
  }
  const DataWindow all = align_window(load_hourly(config.data.price), load_hourly(config.data.renewable),
                                      load_hourly(config.data.background));
  if (all.days < kEvalDays) {
    throw Error(ErrorCode::kInsufficientData,
                "CSV data covers " + std::to_string(all.days) + " whole days, need 7");
  }
  DataWindow eval;
  eval.days = kEvalDays;
  auto first_week = [](const HourlySeries& s) {
    return HourlySeries{s.start_hour, {s.values.begin(), s.values.begin() + kEvalDays * kHoursPerDay}};
  };
  eval.price = first_week(all.price);
  eval.renewable = first_week(all.renewable);
  eval.background = first_week(all.background);
  return {slice_window(eval, config.data.train_day), eval};
}

}  // namespace prefinfer
