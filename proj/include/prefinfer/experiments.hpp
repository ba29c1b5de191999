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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prefinfer/agent.hpp"
#include "prefinfer/dwpi.hpp"
#include "prefinfer/scenarios.hpp"

namespace prefinfer {

// Minimum gap between the two inferred weights for an extreme scenario.
inline constexpr double kExtremeMargin = 0.2;
// Slack allowed when the fixed-weight agent's cost is compared to the user's.
inline constexpr double kCostSlack = 0.5;
inline constexpr int kReportSchemaVersion = 1;

struct ValidationRow {
  std::string scenario;
  std::vector<int> run_hours;
  RewardVector features;
  PreferenceWeights inferred;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool comfort_margin_ok = false;   // max comfort: w_comf - w_cost >= 0.2
  bool cost_margin_ok = false;      // save cost: w_cost - w_comf >= 0.2
  bool mixture_balanced = false;    // mixture gap below both extreme gaps
  bool comfort_ordering_ok = false;  // w_comf: max comfort > mixture > save cost

  bool passed() const { return comfort_margin_ok && cost_margin_ok && mixture_balanced && comfort_ordering_ok; }
  const ValidationRow* find(std::string_view scenario) const;
};

struct ScenarioWeights {
  std::string scenario;
  PreferenceWeights weights;
};

struct ComparisonRow {
  std::string scenario;
  PreferenceWeights weights;
  RewardVector user;
  RewardVector agent;
  RewardVector deviation;  // |agent - user| per axis
};

struct ComparisonReport {
  int days = 0;
  std::vector<ComparisonRow> rows;
  bool comfort_ordering_ok = false;  // agent comfort: max comfort >= mixture >= save cost
  bool cost_ordering_ok = false;     // agent cost: max comfort <= mixture <= save cost
  bool save_cost_ok = false;         // save cost: agent cost >= user cost - 0.5

  bool passed() const { return comfort_ordering_ok && cost_ordering_ok && save_cost_ok; }
  const ComparisonRow* find(std::string_view scenario) const;
};

// Infers weights for each built-in scenario from its one-day demonstration.
ValidationReport run_validation(const DwpiModel& model, const DataWindow& train_window, const EnvConfig& config);

// Recomputes the check flags from the rows.
void score_validation(ValidationReport& report);

// Trains one fixed-weight agent per scenario on the training day (scenarios
// in parallel, scenario i seeded with derive_seed(seed, i)) and compares its
// greedy rollout with the rule-based user over the 7-day window. A non-null
// `initial` network is the starting point of every fixed-weight agent.
ComparisonReport run_comparison(std::span<const ScenarioWeights> inferred, const DataWindow& train_window,
                                const DataWindow& eval_window, const EnvConfig& config, const AgentHyper& hyper,
                                std::uint64_t seed, const Mlp* initial = nullptr);
// Same result with the scenarios trained one after another.
ComparisonReport run_comparison_serial(std::span<const ScenarioWeights> inferred, const DataWindow& train_window,
                                       const DataWindow& eval_window, const EnvConfig& config,
                                       const AgentHyper& hyper, std::uint64_t seed, const Mlp* initial = nullptr);

void score_comparison(ComparisonReport& report);

std::vector<ScenarioWeights> inferred_weights(const ValidationReport& report);

enum class ReportFormat { kJson, kMarkdown };

ReportFormat parse_report_format(std::string_view name);

nlohmann::json report_to_json(const ValidationReport& report);
nlohmann::json report_to_json(const ComparisonReport& report);
ValidationReport validation_from_json(const nlohmann::json& j);
ComparisonReport comparison_from_json(const nlohmann::json& j);

std::string render_report(const ValidationReport& report, ReportFormat format);
std::string render_report(const ComparisonReport& report, ReportFormat format);

void emit_report(const ValidationReport& report, ReportFormat format, const std::filesystem::path& path);
void emit_report(const ComparisonReport& report, ReportFormat format, const std::filesystem::path& path);

// Parse the format name first; an unknown name throws before the file is touched.
void emit_report(const ValidationReport& report, std::string_view format, const std::filesystem::path& path);
void emit_report(const ComparisonReport& report, std::string_view format, const std::filesystem::path& path);

}  // namespace prefinfer
