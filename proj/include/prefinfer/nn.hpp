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
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace prefinfer {

enum class OutputActivation { kIdentity, kSoftmax };

// Same shapes as the parameters of the network they belong to.
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Layer activations of a batched forward pass; activations[0] is the input,
// activations.back() the network output. Samples are columns.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;
};

// Dense feed-forward network: ReLU hidden layers and an identity or softmax
// output layer. Weight matrix l has shape (layer_sizes[l+1], layer_sizes[l]).
class Mlp {
 public:
  Mlp() = default;

  // Parameters drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  Mlp(std::vector<int> layer_sizes, OutputActivation output, std::uint64_t seed);

  Mlp(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases, OutputActivation output);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  std::size_t num_layers() const { return weights_.size(); }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  OutputActivation output_activation() const { return output_; }

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs, ForwardCache* cache = nullptr) const;

  // Accumulates parameter gradients given dLoss/dOutput (one column per
  // sample) for the batch recorded in `cache`. `grads` is overwritten.
  void backpropagate(const ForwardCache& cache, const Eigen::MatrixXd& output_grad, Gradients& grads) const;

  Gradients zero_gradients() const;

 private:
  std::vector<int> layer_sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  OutputActivation output_ = OutputActivation::kIdentity;
};

double mse_loss(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

// Gradients of the mean squared error over all outputs and samples. Returns the loss.
double mse_backward(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                    Gradients& grads);

Gradients backward(const Mlp& net, const Eigen::VectorXd& input, const Eigen::VectorXd& target);

void sgd_step(Mlp& net, const Gradients& grads, double learning_rate);

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);
void save_mlp(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace prefinfer
