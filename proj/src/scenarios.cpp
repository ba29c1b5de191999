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

#include "prefinfer/scenarios.hpp"

#include <algorithm>
#include <charconv>

#include "prefinfer/error.hpp"

namespace prefinfer {

Schedule builtin_schedule(std::string_view name) {
  // Clock intervals map to the hours they start in: 2-4 am -> {2, 3}.
  if (name == kAlwaysMaxComfort) return {std::string(name), {2, 3}};
  if (name == kAlwaysSaveCost) return {std::string(name), {10, 14}};
  if (name == kMixture) return {std::string(name), {6, 10}};
  throw Error(ErrorCode::kUnknownScenario, "unknown scenario '" + std::string(name) + "'");
}

std::vector<Schedule> builtin_schedules() {
  return {builtin_schedule(kAlwaysMaxComfort), builtin_schedule(kAlwaysSaveCost), builtin_schedule(kMixture)};
}

Schedule parse_schedule(std::string_view hours, std::string name) {
  Schedule s{std::move(name), {}};
  if (hours.empty()) throw Error(ErrorCode::kInvalidArgument, "empty schedule");
  while (!hours.empty()) {
    const auto comma = hours.find(',');
    std::string_view token = hours.substr(0, comma);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int h = -1;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), h);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "bad hour '" + std::string(token) + "' in schedule");
    }
    s.run_hours.push_back(h);
    if (comma == std::string_view::npos) break;
    hours.remove_prefix(comma + 1);
  }
  std::sort(s.run_hours.begin(), s.run_hours.end());
  return s;
}

void validate_schedule(const Schedule& schedule, const EnvConfig& config) {
  auto hours = schedule.run_hours;
  std::sort(hours.begin(), hours.end());
  if (std::adjacent_find(hours.begin(), hours.end()) != hours.end()) {
    throw Error(ErrorCode::kInvalidArgument, "schedule '" + schedule.name + "' repeats an hour");
  }
  for (int h : hours) {
    if (h < 0 || h >= kHoursPerDay) {
      throw Error(ErrorCode::kInvalidArgument, "schedule hour " + std::to_string(h) + " outside [0, 23]");
    }
  }
  if (static_cast<int>(hours.size()) != config.task_hours_per_day) {
    throw Error(ErrorCode::kInvalidArgument, "schedule '" + schedule.name + "' runs " +
                                                 std::to_string(hours.size()) + " hours, task needs " +
                                                 std::to_string(config.task_hours_per_day));
  }
}

std::vector<Action> schedule_actions(const Schedule& schedule, int days) {
  std::vector<Action> actions(static_cast<std::size_t>(days) * kHoursPerDay, Action::kIdle);
  for (int d = 0; d < days; ++d) {
    for (int h : schedule.run_hours) actions[static_cast<std::size_t>(d) * kHoursPerDay + h] = Action::kRun;
  }
  return actions;
}

RewardVector run_schedule(const Schedule& schedule, const DataWindow& window, const EnvConfig& config) {
  validate_schedule(schedule, config);
  return replay_actions(schedule_actions(schedule, window.days), window, config);
}

RewardVector demo_features(const Schedule& schedule, const DataWindow& window, const EnvConfig& config) {
  if (window.days != 1) {
    throw Error(ErrorCode::kWindowMismatch,
                "demonstrations use the one-day training window, got " + std::to_string(window.days) + " days");
  }
  return run_schedule(schedule, window, config);
}

}  // namespace prefinfer
