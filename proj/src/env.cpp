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

#include "prefinfer/env.hpp"

#include <algorithm>
#include <cmath>

#include "prefinfer/error.hpp"

namespace prefinfer {
namespace {

EnvState state_at(const DataWindow& window, int day_index, int hour, int task_remaining) {
  const auto i = static_cast<std::size_t>(day_index) * kHoursPerDay + static_cast<std::size_t>(hour);
  return {window.price.values[i], window.renewable.values[i], window.background.values[i],
          task_remaining, hour};
}

void check_day(const DataWindow& window, int day_index) {
  if (day_index < 0 || day_index >= window.days) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "day " + std::to_string(day_index) + " outside window of " + std::to_string(window.days));
  }
}

}  // namespace

bool PreferenceWeights::valid() const {
  return cost >= 0.0 && cost <= 1.0 && comfort >= 0.0 && comfort <= 1.0 &&
         std::abs(cost + comfort - 1.0) <= 1e-9;
}

void EnvConfig::validate() const {
  if (!(appliance_power > 0.0)) throw Error(ErrorCode::kConfigInvalid, "appliance_power must be > 0");
  if (task_hours_per_day < 1) throw Error(ErrorCode::kConfigInvalid, "task_hours_per_day must be >= 1");
  if (!(cost_scale > 0.0)) throw Error(ErrorCode::kConfigInvalid, "cost_scale must be > 0");
}

nlohmann::json env_config_to_json(const EnvConfig& config) {
  std::vector<int> hours;
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (config.comfort_window.test(static_cast<std::size_t>(h))) hours.push_back(h);
  }
  return {{"appliance_power", config.appliance_power},
          {"task_hours_per_day", config.task_hours_per_day},
          {"comfort_window", hours},
          {"cost_scale", config.cost_scale}};
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  try {
    c.appliance_power = j.value("appliance_power", c.appliance_power);
    c.task_hours_per_day = j.value("task_hours_per_day", c.task_hours_per_day);
    c.cost_scale = j.value("cost_scale", c.cost_scale);
    if (j.contains("comfort_window")) {
      c.comfort_window.reset();
      for (int h : j.at("comfort_window").get<std::vector<int>>()) {
        if (h < 0 || h >= kHoursPerDay) {
          throw Error(ErrorCode::kConfigInvalid, "comfort_window hour out of range");
        }
        c.comfort_window.set(static_cast<std::size_t>(h));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("env config: ") + e.what());
  }
  c.validate();
  return c;
}

double reward_cost(double price, double shiftable_power, double background_power,
                   double renewable_power, double cost_scale) {
  if (price < 0.0 || shiftable_power < 0.0 || background_power < 0.0 || renewable_power < 0.0) {
    throw Error(ErrorCode::kNegativeInput, "reward_cost inputs must be non-negative");
  }
  const double imported = std::max(shiftable_power + background_power - renewable_power, 0.0);
  // Written as 0 - x so a zero import yields +0.0 rather than -0.0.
  return 0.0 - cost_scale * price * imported;
}

double reward_comfort(int task_remaining, Action action, int hour_of_day, const HourSet& comfort_window) {
  if (action != Action::kRun || hour_of_day < 0 || hour_of_day >= kHoursPerDay ||
      !comfort_window.test(static_cast<std::size_t>(hour_of_day))) {
    return 0.0;
  }
  return static_cast<double>(task_remaining);
}

double scalarize(const RewardVector& reward, const PreferenceWeights& weights) {
  return reward.cost * weights.cost + reward.comfort * weights.comfort;
}

EnvState reset(const DataWindow& window, int day_index, const EnvConfig& config) {
  check_day(window, day_index);
  return state_at(window, day_index, 0, config.task_hours_per_day);
}

StepResult step(const EnvState& state, Action action, const DataWindow& window, int day_index,
                const EnvConfig& config) {
  check_day(window, day_index);
  if (state.hour_of_day < 0 || state.hour_of_day >= kHoursPerDay) {
    throw Error(ErrorCode::kSteppedAfterTerminal, "hour_of_day outside [0, 23]");
  }
  StepResult r;
  r.ran = action == Action::kRun && state.task_remaining > 0;
  const Action effective = r.ran ? Action::kRun : Action::kIdle;
  const double shiftable = r.ran ? config.appliance_power : 0.0;
  r.reward.cost = reward_cost(state.price, shiftable, state.background_power, state.renewable_power,
                              config.cost_scale);
  r.reward.comfort =
      reward_comfort(state.task_remaining, effective, state.hour_of_day, config.comfort_window);
  const int task = state.task_remaining - (r.ran ? 1 : 0);
  r.terminal = state.hour_of_day == kHoursPerDay - 1;
  if (r.terminal) {
    r.next = state;
    r.next.task_remaining = task;
  } else {
    r.next = state_at(window, day_index, state.hour_of_day + 1, task);
  }
  return r;
}

WindowStats WindowStats::of(const DataWindow& window) {
  auto max_of = [](const HourlySeries& s) {
    return s.values.empty() ? 0.0 : *std::max_element(s.values.begin(), s.values.end());
  };
  return {max_of(window.price), max_of(window.renewable), max_of(window.background)};
}

NormalizedState normalize_state(const EnvState& state, const WindowStats& stats, const EnvConfig& config) {
  if (!(stats.max_price > 0.0) || !(stats.max_renewable > 0.0) || !(stats.max_background > 0.0)) {
    throw Error(ErrorCode::kZeroMax, "window maxima must be positive");
  }
  return {state.price / stats.max_price,
          state.renewable_power / stats.max_renewable,
          state.background_power / stats.max_background,
          static_cast<double>(state.task_remaining) / config.task_hours_per_day,
          static_cast<double>(state.hour_of_day) / kHoursPerDay};
}

HomeEnergyEnv::HomeEnergyEnv(const DataWindow& window, EnvConfig config)
    : window_(&window), config_(config) {
  config_.validate();
}

const EnvState& HomeEnergyEnv::reset(int day_index) {
  state_ = prefinfer::reset(*window_, day_index, config_);
  day_ = day_index;
  done_ = false;
  return state_;
}

StepResult HomeEnergyEnv::step(Action action) {
  if (done_) throw Error(ErrorCode::kSteppedAfterTerminal, "episode finished; call reset()");
  StepResult r = prefinfer::step(state_, action, *window_, day_, config_);
  state_ = r.next;
  done_ = r.terminal;
  return r;
}

RewardVector replay_actions(std::span<const Action> actions, const DataWindow& window,
                            const EnvConfig& config) {
  if (actions.size() != window.hours()) {
    throw Error(ErrorCode::kShapeMismatch, "action sequence length must equal window hours");
  }
  RewardVector total;
  for (int d = 0; d < window.days; ++d) {
    EnvState s = reset(window, d, config);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto r = step(s, actions[static_cast<std::size_t>(d) * kHoursPerDay + h], window, d, config);
      total += r.reward;
      s = r.next;
    }
  }
  return total;
}

}  // namespace prefinfer
