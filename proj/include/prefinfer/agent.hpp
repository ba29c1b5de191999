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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "prefinfer/datahub.hpp"
#include "prefinfer/env.hpp"
#include "prefinfer/nn.hpp"
#include "prefinfer/random.hpp"

namespace prefinfer {

enum class EpsilonSchedule {
  kReciprocal,      // 1 / (0.98 * episode)
  kMultiplicative,  // start * 0.98^(episode - 1)
};

// Defaults are the DWMORL agent hyperparameters.
struct AgentHyper {
  int episodes = 20000;
  int replay_capacity = 1000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  EpsilonSchedule epsilon_schedule = EpsilonSchedule::kReciprocal;
  int start_training_after = 10;  // episodes
  int target_copy_period = 50;    // episodes
  int batch_size = 64;
  double gamma = 1.0;
  double learning_rate = 0.001;
  std::vector<int> hidden_layers = {32, 32, 16};

  void validate() const;
};

nlohmann::json agent_hyper_to_json(const AgentHyper& hyper);
AgentHyper agent_hyper_from_json(const nlohmann::json& j);

double epsilon(int episode, const AgentHyper& hyper);

// w_cost ~ U[0, 1), w_comf = 1 - w_cost.
PreferenceWeights sample_weights(Rng& rng);

inline constexpr int kExtendedStateSize = 7;
inline constexpr int kNumActions = 2;
using ExtendedState = std::array<double, kExtendedStateSize>;

ExtendedState extend_state(const NormalizedState& state, const PreferenceWeights& weights);

struct Transition {
  ExtendedState state{};
  int action = 0;
  double reward = 0.0;  // scalarized
  ExtendedState next{};
  bool terminal = false;
};

// Fixed-capacity ring buffer; once full, each push evicts the oldest entry.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i = 0 is the oldest stored transition.
  const Transition& operator[](std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest element once full
  std::vector<Transition> items_;
};

int greedy_action(const Mlp& q_net, const ExtendedState& state);

// Epsilon-greedy over the two Q outputs; ties go to action 0 (idle).
int select_action(const Mlp& q_net, const ExtendedState& state, double epsilon, Rng& rng);

// Q-network plus the input scaling it was trained with.
struct QAgent {
  Mlp q_net;
  WindowStats stats;
};

// Weight-conditioned DQN: every episode draws fresh preference weights.
QAgent train_dwmorl(const DataWindow& window, const EnvConfig& config, const AgentHyper& hyper,
                    std::uint64_t seed);

// Same loop with the weight input held at `weights` every episode. A non-null
// `initial` network replaces the seeded initialization.
QAgent train_fixed(const DataWindow& window, const EnvConfig& config, const AgentHyper& hyper,
                   const PreferenceWeights& weights, std::uint64_t seed, const Mlp* initial = nullptr);

struct Rollout {
  std::vector<Action> actions;  // effective actions, days * 24
  RewardVector total;           // unscalarized sum over every day
};

// One episode per day of `window`; epsilon = 0 gives the greedy policy.
Rollout rollout(const QAgent& agent, const PreferenceWeights& weights, const DataWindow& window,
                const EnvConfig& config, double epsilon = 0.0, std::uint64_t seed = 0);

struct AgentProvenance {
  AgentHyper hyper;
  std::uint64_t seed = 0;
  std::optional<PreferenceWeights> fixed_weights;
};

// Writes the network in the model format plus a sidecar JSON holding the
// provenance and input scaling.
void save_agent(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path,
                const QAgent& agent, const AgentProvenance& provenance);
QAgent load_agent(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path);

}  // namespace prefinfer
