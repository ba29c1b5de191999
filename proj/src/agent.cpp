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

#include "prefinfer/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "prefinfer/error.hpp"

namespace prefinfer {
namespace {

void check_training_window(const DataWindow& window) {
  if (window.days < 1 || window.hours() == 0) {
    throw Error(ErrorCode::kInsufficientData, "training needs a one-day window");
  }
  if (window.days != 1) {
    throw Error(ErrorCode::kWindowMismatch,
                "training window must span exactly one day, got " + std::to_string(window.days));
  }
  window.validate();
}

Eigen::VectorXd as_vector(const ExtendedState& s) {
  return Eigen::Map<const Eigen::VectorXd>(s.data(), kExtendedStateSize);
}

class DqnTrainer {
 public:
  DqnTrainer(const DataWindow& window, const EnvConfig& config, const AgentHyper& hyper, std::uint64_t seed,
             const Mlp* initial)
      : window_(window),
        config_(config),
        hyper_(hyper),
        rng_(seed),
        memory_(static_cast<std::size_t>(hyper.replay_capacity)),
        states_(kExtendedStateSize, hyper.batch_size),
        next_states_(kExtendedStateSize, hyper.batch_size),
        output_grad_(kNumActions, hyper.batch_size) {
    std::vector<int> sizes = {kExtendedStateSize};
    sizes.insert(sizes.end(), hyper.hidden_layers.begin(), hyper.hidden_layers.end());
    sizes.push_back(kNumActions);
    agent_.q_net = Mlp(sizes, OutputActivation::kIdentity, derive_seed(seed, 0x1217));
    if (initial != nullptr) {
      if (initial->layer_sizes() != sizes) {
        throw Error(ErrorCode::kShapeMismatch, "initial Q-network does not match the configured layers");
      }
      agent_.q_net = *initial;
    }
    agent_.stats = WindowStats::of(window);
    target_ = agent_.q_net;
  }

  QAgent run(const std::optional<PreferenceWeights>& fixed) {
    for (int episode = 1; episode <= hyper_.episodes; ++episode) {
      const PreferenceWeights w = fixed ? *fixed : sample_weights(rng_);
      const double eps = epsilon(episode, hyper_);
      const bool learning = episode > hyper_.start_training_after;

      EnvState s = reset(window_, 0, config_);
      ExtendedState x = extend_state(normalize_state(s, agent_.stats, config_), w);
      for (int h = 0; h < kHoursPerDay; ++h) {
        const int a = select_action(agent_.q_net, x, eps, rng_);
        const StepResult r = step(s, static_cast<Action>(a), window_, 0, config_);
        const ExtendedState nx = extend_state(normalize_state(r.next, agent_.stats, config_), w);
        memory_.push({x, a, scalarize(r.reward, w), nx, r.terminal});
        if (learning && memory_.size() >= static_cast<std::size_t>(hyper_.batch_size)) update();
        s = r.next;
        x = nx;
      }
      if (episode % hyper_.target_copy_period == 0) target_ = agent_.q_net;
    }
    return agent_;
  }

 private:
  void update() {
    const int batch = hyper_.batch_size;
    actions_.resize(static_cast<std::size_t>(batch));
    rewards_.resize(static_cast<std::size_t>(batch));
    terminal_.resize(static_cast<std::size_t>(batch));
    for (int j = 0; j < batch; ++j) {
      const Transition& t = memory_[uniform_index(rng_, memory_.size())];
      for (int i = 0; i < kExtendedStateSize; ++i) {
        states_(i, j) = t.state[static_cast<std::size_t>(i)];
        next_states_(i, j) = t.next[static_cast<std::size_t>(i)];
      }
      actions_[static_cast<std::size_t>(j)] = t.action;
      rewards_[static_cast<std::size_t>(j)] = t.reward;
      terminal_[static_cast<std::size_t>(j)] = t.terminal;
    }
    const Eigen::MatrixXd next_q = target_.forward_batch(next_states_);
    const Eigen::MatrixXd q = agent_.q_net.forward_batch(states_, &cache_);

    // Squared TD error of the taken action, averaged over the batch.
    output_grad_.setZero();
    const double scale = 2.0 / static_cast<double>(batch);
    for (int j = 0; j < batch; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      double target = rewards_[ju];
      if (!terminal_[ju]) target += hyper_.gamma * next_q.col(j).maxCoeff();
      output_grad_(actions_[ju], j) = scale * (q(actions_[ju], j) - target);
    }
    agent_.q_net.backpropagate(cache_, output_grad_, grads_);
    sgd_step(agent_.q_net, grads_, hyper_.learning_rate);
  }

  const DataWindow& window_;
  const EnvConfig& config_;
  const AgentHyper& hyper_;
  Rng rng_;
  ReplayMemory memory_;
  QAgent agent_;
  Mlp target_;

  Eigen::MatrixXd states_;
  Eigen::MatrixXd next_states_;
  Eigen::MatrixXd output_grad_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
  std::vector<bool> terminal_;
  ForwardCache cache_;
  Gradients grads_;
};

QAgent train(const DataWindow& window, const EnvConfig& config, const AgentHyper& hyper,
             const std::optional<PreferenceWeights>& fixed, std::uint64_t seed, const Mlp* initial) {
  check_training_window(window);
  config.validate();
  hyper.validate();
  if (fixed && !fixed->valid()) throw Error(ErrorCode::kInvalidArgument, "fixed weights must lie on the simplex");
  return DqnTrainer(window, config, hyper, seed, initial).run(fixed);
}

const char* schedule_name(EpsilonSchedule s) {
  return s == EpsilonSchedule::kMultiplicative ? "multiplicative" : "reciprocal";
}

}  // namespace

void AgentHyper::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, "agent: " + what); };
  if (episodes < 1) fail("episodes must be >= 1");
  if (replay_capacity < 1) fail("replay_capacity must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (start_training_after < 0) fail("start_training_after must be >= 0");
  if (target_copy_period < 1) fail("target_copy_period must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(gamma > 0.0) || gamma > 1.0) fail("gamma must be in (0, 1]");
  if (!(epsilon_end > 0.0) || epsilon_end > epsilon_start || epsilon_start > 1.0) {
    fail("need 0 < epsilon_end <= epsilon_start <= 1");
  }
  if (hidden_layers.empty()) fail("hidden_layers must be non-empty");
  for (int h : hidden_layers) {
    if (h < 1) fail("hidden layer sizes must be positive");
  }
}

nlohmann::json agent_hyper_to_json(const AgentHyper& h) {
  return {{"episodes", h.episodes},
          {"replay_capacity", h.replay_capacity},
          {"epsilon_start", h.epsilon_start},
          {"epsilon_end", h.epsilon_end},
          {"epsilon_schedule", schedule_name(h.epsilon_schedule)},
          {"start_training_after", h.start_training_after},
          {"target_copy_period", h.target_copy_period},
          {"batch_size", h.batch_size},
          {"gamma", h.gamma},
          {"learning_rate", h.learning_rate},
          {"hidden_layers", h.hidden_layers}};
}

AgentHyper agent_hyper_from_json(const nlohmann::json& j) {
  AgentHyper h;
  try {
    h.episodes = j.value("episodes", h.episodes);
    h.replay_capacity = j.value("replay_capacity", h.replay_capacity);
    h.epsilon_start = j.value("epsilon_start", h.epsilon_start);
    h.epsilon_end = j.value("epsilon_end", h.epsilon_end);
    const std::string schedule = j.value("epsilon_schedule", std::string("reciprocal"));
    if (schedule == "reciprocal") {
      h.epsilon_schedule = EpsilonSchedule::kReciprocal;
    } else if (schedule == "multiplicative") {
      h.epsilon_schedule = EpsilonSchedule::kMultiplicative;
    } else {
      throw Error(ErrorCode::kConfigInvalid, "unknown epsilon_schedule '" + schedule + "'");
    }
    h.start_training_after = j.value("start_training_after", h.start_training_after);
    h.target_copy_period = j.value("target_copy_period", h.target_copy_period);
    h.batch_size = j.value("batch_size", h.batch_size);
    h.gamma = j.value("gamma", h.gamma);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.hidden_layers = j.value("hidden_layers", h.hidden_layers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("agent config: ") + e.what());
  }
  h.validate();
  return h;
}

double epsilon(int episode, const AgentHyper& hyper) {
  if (episode < 1) throw Error(ErrorCode::kInvalidArgument, "episode numbers start at 1");
  double e = 0.0;
  if (hyper.epsilon_schedule == EpsilonSchedule::kReciprocal) {
    e = 1.0 / (0.98 * episode);
  } else {
    e = hyper.epsilon_start * std::pow(0.98, episode - 1);
  }
  return std::clamp(e, hyper.epsilon_end, hyper.epsilon_start);
}

PreferenceWeights sample_weights(Rng& rng) {
  return PreferenceWeights::from_cost(uniform01(rng));
}

ExtendedState extend_state(const NormalizedState& state, const PreferenceWeights& weights) {
  return {state[0], state[1], state[2], state[3], state[4], weights.cost, weights.comfort};
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::kInvalidArgument, "replay capacity must be positive");
  items_.reserve(capacity);
}

void ReplayMemory::push(const Transition& t) {
  if (items_.size() < capacity_) {
    items_.push_back(t);
  } else {
    items_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  }
}

const Transition& ReplayMemory::operator[](std::size_t i) const {
  if (i >= items_.size()) throw Error(ErrorCode::kIndexOutOfRange, "replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

int greedy_action(const Mlp& q_net, const ExtendedState& state) {
  const Eigen::VectorXd q = q_net.forward(as_vector(state));
  return q(1) > q(0) ? 1 : 0;
}

int select_action(const Mlp& q_net, const ExtendedState& state, double epsilon, Rng& rng) {
  if (uniform01(rng) < epsilon) return static_cast<int>(uniform_index(rng, kNumActions));
  return greedy_action(q_net, state);
}

QAgent train_dwmorl(const DataWindow& window, const EnvConfig& config, const AgentHyper& hyper,
                    std::uint64_t seed) {
  return train(window, config, hyper, std::nullopt, seed, nullptr);
}

QAgent train_fixed(const DataWindow& window, const EnvConfig& config, const AgentHyper& hyper,
                   const PreferenceWeights& weights, std::uint64_t seed, const Mlp* initial) {
  return train(window, config, hyper, weights, seed, initial);
}

Rollout rollout(const QAgent& agent, const PreferenceWeights& weights, const DataWindow& window,
                const EnvConfig& config, double epsilon, std::uint64_t seed) {
  Rng rng(seed);
  Rollout out;
  out.actions.reserve(window.hours());
  for (int d = 0; d < window.days; ++d) {
    EnvState s = reset(window, d, config);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const ExtendedState x = extend_state(normalize_state(s, agent.stats, config), weights);
      const int a = select_action(agent.q_net, x, epsilon, rng);
      const StepResult r = step(s, static_cast<Action>(a), window, d, config);
      out.actions.push_back(r.ran ? Action::kRun : Action::kIdle);
      out.total += r.reward;
      s = r.next;
    }
  }
  return out;
}

void save_agent(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path,
                const QAgent& agent, const AgentProvenance& provenance) {
  save_mlp(model_path, agent.q_net);
  nlohmann::json meta = {
      {"hyper", agent_hyper_to_json(provenance.hyper)},
      {"seed", provenance.seed},
      {"window_stats",
       {{"max_price", agent.stats.max_price},
        {"max_renewable", agent.stats.max_renewable},
        {"max_background", agent.stats.max_background}}},
  };
  if (provenance.fixed_weights) {
    meta["fixed_weights"] = {provenance.fixed_weights->cost, provenance.fixed_weights->comfort};
  } else {
    meta["fixed_weights"] = nullptr;
  }
  std::ofstream out(sidecar_path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + sidecar_path.string());
  out << meta.dump(2) << '\n';
}

QAgent load_agent(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path) {
  QAgent agent;
  agent.q_net = load_mlp(model_path);
  std::ifstream in(sidecar_path);
  if (!in) throw Error(ErrorCode::kModelMissing, "cannot read " + sidecar_path.string());
  try {
    const auto meta = nlohmann::json::parse(in);
    const auto& s = meta.at("window_stats");
    agent.stats = {s.at("max_price").get<double>(), s.at("max_renewable").get<double>(),
                   s.at("max_background").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptModel, sidecar_path.string() + ": " + e.what());
  }
  if (agent.q_net.input_size() != kExtendedStateSize || agent.q_net.output_size() != kNumActions) {
    throw Error(ErrorCode::kCorruptModel, "Q-network must map 7 inputs to 2 outputs");
  }
  return agent;
}

}  // namespace prefinfer
