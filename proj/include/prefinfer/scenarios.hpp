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

#include <string>
#include <string_view>
#include <vector>

#include "prefinfer/datahub.hpp"
#include "prefinfer/env.hpp"

namespace prefinfer {

// Rule-based simulated user: runs the appliance at fixed clock hours every day.
struct Schedule {
  std::string name;
  std::vector<int> run_hours;  // sorted, distinct, each in [0, 23]
};

inline constexpr std::string_view kAlwaysMaxComfort = "always_max_comfort";
inline constexpr std::string_view kAlwaysSaveCost = "always_save_cost";
inline constexpr std::string_view kMixture = "mixture";

Schedule builtin_schedule(std::string_view name);

// The three built-in users in reporting order: max comfort, save cost, mixture.
std::vector<Schedule> builtin_schedules();

// Parses "H1,H2,..." into a schedule named `name`.
Schedule parse_schedule(std::string_view hours, std::string name = "custom");

// Throws kInvalidArgument unless hours are distinct, in range and number
// exactly task_hours_per_day.
void validate_schedule(const Schedule& schedule, const EnvConfig& config);

std::vector<Action> schedule_actions(const Schedule& schedule, int days);

// Cumulative reward of following the schedule every day of the window.
RewardVector run_schedule(const Schedule& schedule, const DataWindow& window, const EnvConfig& config);

// Demonstration features for inference; the window must be the one-day
// training window (kWindowMismatch otherwise).
RewardVector demo_features(const Schedule& schedule, const DataWindow& window, const EnvConfig& config);

}  // namespace prefinfer
