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

#include <array>
#include <bitset>
#include <span>
#include <vector>

#include <json.hpp>

#include "prefinfer/datahub.hpp"

namespace prefinfer {

// Point on the two-objective simplex: [w_cost, w_comf].
struct PreferenceWeights {
  double cost = 0.5;
  double comfort = 0.5;

  static PreferenceWeights from_cost(double w_cost) { return {w_cost, 1.0 - w_cost}; }
  bool valid() const;

  friend bool operator==(const PreferenceWeights&, const PreferenceWeights&) = default;
};

// Per-step (or accumulated) reward: cost <= 0 is negated spend, comfort >= 0.
struct RewardVector {
  double cost = 0.0;
  double comfort = 0.0;

  RewardVector& operator+=(const RewardVector& o) {
    cost += o.cost;
    comfort += o.comfort;
    return *this;
  }
  friend RewardVector operator+(RewardVector a, const RewardVector& b) { return a += b; }
  friend bool operator==(const RewardVector&, const RewardVector&) = default;
};

enum class Action : int { kIdle = 0, kRun = 1 };

struct EnvState {
  double price = 0.0;             // $/kWh
  double renewable_power = 0.0;   // kW
  double background_power = 0.0;  // kW
  int task_remaining = 0;         // hours
  int hour_of_day = 0;            // 0..23

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

using HourSet = std::bitset<kHoursPerDay>;

struct EnvConfig {
  double appliance_power = 1.0;  // kW drawn by the shiftable load while running
  int task_hours_per_day = 2;
  HourSet comfort_window = HourSet{0x7F};  // hours 0..6, hour-start convention
  double cost_scale = 10.0;

  void validate() const;
};

nlohmann::json env_config_to_json(const EnvConfig& config);
EnvConfig env_config_from_json(const nlohmann::json& j);

// -cost_scale * price * max(shiftable + background - renewable, 0).
double reward_cost(double price, double shiftable_power, double background_power,
                   double renewable_power, double cost_scale);

// task_remaining * [action runs] * [hour in comfort window].
double reward_comfort(int task_remaining, Action action, int hour_of_day, const HourSet& comfort_window);

double scalarize(const RewardVector& reward, const PreferenceWeights& weights);

EnvState reset(const DataWindow& window, int day_index, const EnvConfig& config);

struct StepResult {
  EnvState next;
  RewardVector reward;
  bool terminal = false;
  bool ran = false;  // effective action after forcing idle on a finished task
};

// Pure transition. The step out of hour 23 is terminal; its `next` keeps hour
// 23's exogenous values with the updated task counter.
StepResult step(const EnvState& state, Action action, const DataWindow& window, int day_index,
                const EnvConfig& config);

// Per-series maxima used to scale network inputs.
struct WindowStats {
  double max_price = 1.0;
  double max_renewable = 1.0;
  double max_background = 1.0;

  static WindowStats of(const DataWindow& window);
  friend bool operator==(const WindowStats&, const WindowStats&) = default;
};

using NormalizedState = std::array<double, 5>;

NormalizedState normalize_state(const EnvState& state, const WindowStats& stats, const EnvConfig& config);

// Stateful wrapper that tracks episode termination over one day.
class HomeEnergyEnv {
 public:
  HomeEnergyEnv(const DataWindow& window, EnvConfig config);

  const EnvState& reset(int day_index);
  StepResult step(Action action);

  const EnvState& state() const { return state_; }
  bool done() const { return done_; }

 private:
  const DataWindow* window_;
  EnvConfig config_;
  EnvState state_{};
  int day_ = 0;
  bool done_ = true;
};

// Cumulative reward of a fixed action sequence, one 24-step episode per day.
// `actions` must hold exactly window.days * 24 entries.
RewardVector replay_actions(std::span<const Action> actions, const DataWindow& window,
                            const EnvConfig& config);

}  // namespace prefinfer
