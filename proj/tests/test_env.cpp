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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prefinfer/env.hpp"
#include "prefinfer/error.hpp"
#include "prefinfer/random.hpp"

using namespace prefinfer;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::kInvalidArgument;
}

DataWindow flat_day(double price, double renewable, double background) {
  DataWindow w;
  w.price = {0, std::vector<double>(24, price)};
  w.renewable = {0, std::vector<double>(24, renewable)};
  w.background = {0, std::vector<double>(24, background)};
  w.days = 1;
  return w;
}

std::vector<Action> to_actions(const std::vector<int>& run) {
  std::vector<Action> out;
  for (int r : run) out.push_back(r ? Action::kRun : Action::kIdle);
  return out;
}

}  // namespace

TEST(Rewards, CostExamples) {
  EXPECT_NEAR(reward_cost(0.05, 1.0, 0.5, 0.2, 10), -0.65, 1e-12);
  EXPECT_EQ(reward_cost(0.05, 1.0, 0.5, 5.0, 10), 0.0);
  EXPECT_EQ(reward_cost(0.0, 1.0, 0.5, 0.0, 10), 0.0);
  EXPECT_FALSE(std::signbit(reward_cost(0.0, 1.0, 0.5, 0.0, 10)));
  EXPECT_EQ(code_of([] { reward_cost(-0.01, 1.0, 0.5, 0.0, 10); }), ErrorCode::kNegativeInput);
  EXPECT_EQ(code_of([] { reward_cost(0.05, 1.0, -0.5, 0.0, 10); }), ErrorCode::kNegativeInput);
}

TEST(Rewards, ComfortExamples) {
  const HourSet window{0x7F};
  EXPECT_EQ(reward_comfort(2, Action::kRun, 2, window), 2.0);
  EXPECT_EQ(reward_comfort(2, Action::kRun, 10, window), 0.0);
  EXPECT_EQ(reward_comfort(2, Action::kIdle, 2, window), 0.0);
  EXPECT_EQ(reward_comfort(1, Action::kRun, 6, window), 1.0);
  EXPECT_EQ(reward_comfort(1, Action::kRun, 7, window), 0.0);
}

TEST(Rewards, ScalarizeExamples) {
  EXPECT_NEAR(scalarize({-0.65, 2.0}, {0.5, 0.5}), 0.675, 1e-12);
  EXPECT_EQ(scalarize({-1.25, 3.0}, {1.0, 0.0}), -1.25);
  EXPECT_EQ(scalarize({0.0, 0.0}, {0.3, 0.7}), 0.0);
}

TEST(Rewards, ScalarizeIsAffineInWeights) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const RewardVector r{-20.0 * uniform01(rng), 3.0 * uniform01(rng)};
    const auto w1 = PreferenceWeights::from_cost(uniform01(rng));
    const auto w2 = PreferenceWeights::from_cost(uniform01(rng));
    const double a = uniform01(rng);
    const PreferenceWeights mix{a * w1.cost + (1 - a) * w2.cost, a * w1.comfort + (1 - a) * w2.comfort};
    EXPECT_NEAR(scalarize(r, mix), a * scalarize(r, w1) + (1 - a) * scalarize(r, w2), 1e-12);
  }
}

TEST(Reset, StartsDayWithFullTask) {
  const auto w = synthesize(1, 2);
  const EnvConfig cfg;
  const EnvState s = reset(w, 1, cfg);
  EXPECT_EQ(s.hour_of_day, 0);
  EXPECT_EQ(s.task_remaining, 2);
  EXPECT_EQ(s.price, w.price.values[24]);
  EXPECT_EQ(s, reset(w, 1, cfg));
  EXPECT_EQ(code_of([&] { reset(w, 2, cfg); }), ErrorCode::kIndexOutOfRange);
}

TEST(Step, RunningInComfortWindow) {
  const auto w = flat_day(0.05, 0.0, 0.5);
  const EnvConfig cfg;
  EnvState s = reset(w, 0, cfg);
  s.hour_of_day = 2;
  const StepResult r = step(s, Action::kRun, w, 0, cfg);
  // 1 kW appliance on top of 0.5 kW background: -10 * 0.05 * 1.5.
  EXPECT_NEAR(r.reward.cost, -0.75, 1e-12);
  EXPECT_EQ(r.reward.comfort, 2.0);
  EXPECT_EQ(r.next.task_remaining, 1);
  EXPECT_EQ(r.next.hour_of_day, 3);
  EXPECT_TRUE(r.ran);
  EXPECT_FALSE(r.terminal);
}

TEST(Step, HourTwentyThreeIsTerminal) {
  const auto w = synthesize(4, 1);
  const EnvConfig cfg;
  for (Action a : {Action::kIdle, Action::kRun}) {
    EnvState s = reset(w, 0, cfg);
    s.hour_of_day = 23;
    EXPECT_TRUE(step(s, a, w, 0, cfg).terminal);
  }
}

TEST(Step, FinishedTaskForcesIdle) {
  const auto w = flat_day(0.05, 0.0, 0.5);
  const EnvConfig cfg;
  EnvState s = reset(w, 0, cfg);
  s.task_remaining = 0;
  s.hour_of_day = 1;
  const StepResult run = step(s, Action::kRun, w, 0, cfg);
  const StepResult idle = step(s, Action::kIdle, w, 0, cfg);
  EXPECT_FALSE(run.ran);
  EXPECT_EQ(run.reward, idle.reward);
  EXPECT_EQ(run.reward.comfort, 0.0);
  EXPECT_EQ(run.next.task_remaining, 0);
}

TEST(Environment, TwentyFourStepsThenRefuses) {
  const auto w = synthesize(4, 1);
  HomeEnergyEnv env(w, EnvConfig{});
  env.reset(0);
  int steps = 0;
  while (!env.done()) {
    env.step(Action::kRun);
    ++steps;
  }
  EXPECT_EQ(steps, 24);
  EXPECT_EQ(code_of([&] { env.step(Action::kIdle); }), ErrorCode::kSteppedAfterTerminal);
}

TEST(Environment, MatchesStraightLineOracle) {
  const auto w = synthesize(2024, 1);
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> run(24);
    for (auto& r : run) r = static_cast<int>(uniform_index(rng, 2));
    const RewardVector got = replay_actions(to_actions(run), w, EnvConfig{});
    const auto want = oracle::day_rewards(w, 0, run);
    EXPECT_NEAR(got.cost, want.cost, 1e-12);
    EXPECT_NEAR(got.comfort, want.comfort, 1e-12);
  }
}

TEST(Environment, ReplayIsBitIdentical) {
  const auto w = synthesize(5, 3);
  Rng rng(1);
  std::vector<Action> actions(72);
  for (auto& a : actions) a = uniform_index(rng, 2) ? Action::kRun : Action::kIdle;
  EXPECT_EQ(replay_actions(actions, w, EnvConfig{}), replay_actions(actions, w, EnvConfig{}));
  EXPECT_EQ(code_of([&] { replay_actions(std::span(actions).first(70), w, EnvConfig{}); }),
            ErrorCode::kShapeMismatch);
}

TEST(Environment, ComfortBoundedAndAttainedEarly) {
  const auto w = synthesize(8, 1);
  const EnvConfig cfg;
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> run(24);
    for (auto& r : run) r = static_cast<int>(uniform_index(rng, 2));
    EXPECT_LE(replay_actions(to_actions(run), w, cfg).comfort, 3.0);
  }
  std::vector<int> early(24, 0);
  early[0] = early[1] = 1;
  EXPECT_EQ(replay_actions(to_actions(early), w, cfg).comfort, 3.0);
}

TEST(Normalize, Examples) {
  const auto w = synthesize(6, 1);
  const WindowStats stats = WindowStats::of(w);
  const EnvConfig cfg;
  const EnvState peak{stats.max_price, stats.max_renewable, stats.max_background, 2, 0};
  EXPECT_EQ(normalize_state(peak, stats, cfg), (NormalizedState{1, 1, 1, 1, 0}));
  EXPECT_EQ(normalize_state(EnvState{}, stats, cfg), (NormalizedState{0, 0, 0, 0, 0}));
  WindowStats zero = stats;
  zero.max_price = 0.0;
  EXPECT_EQ(code_of([&] { normalize_state(peak, zero, cfg); }), ErrorCode::kZeroMax);

  EnvState s = reset(w, 0, cfg);
  for (int h = 0; h < 24; ++h) {
    for (double v : normalize_state(s, stats, cfg)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    s = step(s, Action::kRun, w, 0, cfg).next;
  }
}

TEST(EnvConfigJson, RoundTripAndValidation) {
  EnvConfig cfg;
  cfg.comfort_window = HourSet{0x3C};
  cfg.task_hours_per_day = 3;
  const EnvConfig back = env_config_from_json(env_config_to_json(cfg));
  EXPECT_EQ(back.comfort_window, cfg.comfort_window);
  EXPECT_EQ(back.task_hours_per_day, 3);
  auto j = env_config_to_json(EnvConfig{});
  j["appliance_power"] = 0.0;
  EXPECT_EQ(code_of([&] { env_config_from_json(j); }), ErrorCode::kConfigInvalid);
}
