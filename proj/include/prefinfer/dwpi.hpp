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
#include <span>
#include <vector>

#include <json.hpp>

#include "prefinfer/agent.hpp"
#include "prefinfer/env.hpp"
#include "prefinfer/nn.hpp"

namespace prefinfer {

// One training pair: cumulative reward of a trajectory and the weights that produced it.
struct DemoRecord {
  RewardVector features;
  PreferenceWeights label;

  friend bool operator==(const DemoRecord&, const DemoRecord&) = default;
};

// Per-feature standardization (population standard deviation).
struct FeatureScaler {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> stddev{1.0, 1.0};

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;
};

struct DwpiHyper {
  int epochs = 1500;
  int batch_size = 32;
  double learning_rate = 0.01;
  std::vector<int> hidden_layers = {16, 16, 8};

  void validate() const;
};

nlohmann::json dwpi_hyper_to_json(const DwpiHyper& hyper);
DwpiHyper dwpi_hyper_from_json(const nlohmann::json& j);

// [k*step, 1 - k*step] for k = 0..1/step, ascending in w_cost.
std::vector<PreferenceWeights> weight_grid(double step);

// One greedy rollout per grid weight. Grid points run in parallel; the
// result is identical to build_dataset_serial.
std::vector<DemoRecord> build_dataset(const QAgent& agent, const DataWindow& window, const EnvConfig& config,
                                      std::span<const PreferenceWeights> grid);
std::vector<DemoRecord> build_dataset_serial(const QAgent& agent, const DataWindow& window,
                                             const EnvConfig& config, std::span<const PreferenceWeights> grid);

FeatureScaler fit_scaler(std::span<const DemoRecord> records);
std::array<double, 2> apply_scaler(const FeatureScaler& scaler, const RewardVector& features);

struct DwpiModel {
  Mlp net;
  FeatureScaler scaler;
};

// Supervised MSE regression from standardized features to weights through a
// softmax head, plain minibatch SGD with a per-epoch shuffle.
DwpiModel train_dwpi(std::span<const DemoRecord> records, const DwpiHyper& hyper, std::uint64_t seed);

PreferenceWeights infer(const DwpiModel& model, const RewardVector& demonstration);

struct FitSummary {
  double mse = 0.0;          // mean over records and both components
  double mae_cost = 0.0;     // mean |inferred - true| per component
  double mae_comfort = 0.0;
};

FitSummary evaluate(const DwpiModel& model, std::span<const DemoRecord> records);

// Mean held-out MSE over every leave-one-out split. Fold i trains with seed
// derive_seed(seed, i); folds run in parallel in leave_one_out_mse.
double leave_one_out_mse(std::span<const DemoRecord> records, const DwpiHyper& hyper, std::uint64_t seed);
double leave_one_out_mse_serial(std::span<const DemoRecord> records, const DwpiHyper& hyper,
                                std::uint64_t seed);

// CSV with columns cum_cost, cum_comfort, w_cost, w_comf.
void save_dataset(const std::filesystem::path& path, std::span<const DemoRecord> records);
std::vector<DemoRecord> load_dataset(const std::filesystem::path& path);

void save_dwpi(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path,
               const DwpiModel& model, const DwpiHyper& hyper, std::uint64_t seed);
DwpiModel load_dwpi(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path);

}  // namespace prefinfer
