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

#include "prefinfer/nn.hpp"

#include <cmath>
#include <fstream>

#include "prefinfer/error.hpp"
#include "prefinfer/random.hpp"

namespace prefinfer {
namespace {

void softmax_columns(Eigen::MatrixXd& z) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto col = z.col(c);
    col.array() -= col.maxCoeff();
    col = col.array().exp().matrix();
    col /= col.sum();
  }
}

std::vector<int> sizes_from(const std::vector<Eigen::MatrixXd>& weights) {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(weights.front().cols()));
  for (const auto& w : weights) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

void check_grad_shapes(const Mlp& net, const Gradients& grads) {
  if (grads.weights.size() != net.num_layers() || grads.biases.size() != net.num_layers()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient layer count differs from network");
  }
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    if (grads.weights[l].rows() != net.weights()[l].rows() ||
        grads.weights[l].cols() != net.weights()[l].cols() ||
        grads.biases[l].size() != net.biases()[l].size()) {
      throw Error(ErrorCode::kShapeMismatch, "gradient shape differs at layer " + std::to_string(l));
    }
  }
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation output, std::uint64_t seed)
    : layer_sizes_(std::move(layer_sizes)), output_(output) {
  if (layer_sizes_.size() < 2) throw Error(ErrorCode::kShapeMismatch, "need at least input and output sizes");
  for (int s : layer_sizes_) {
    if (s < 1) throw Error(ErrorCode::kShapeMismatch, "layer sizes must be positive");
  }
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int fan_in = layer_sizes_[l];
    const int fan_out = layer_sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    Eigen::VectorXd b(fan_out);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
    }
    for (int r = 0; r < fan_out; ++r) b(r) = bound * (2.0 * uniform01(rng) - 1.0);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

Mlp::Mlp(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases, OutputActivation output)
    : weights_(std::move(weights)), biases_(std::move(biases)), output_(output) {
  if (weights_.empty() || weights_.size() != biases_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "weights and biases must be non-empty and paired");
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (biases_[l].size() != weights_[l].rows() ||
        (l > 0 && weights_[l].cols() != weights_[l - 1].rows())) {
      throw Error(ErrorCode::kShapeMismatch, "layer shapes do not chain at layer " + std::to_string(l));
    }
  }
  layer_sizes_ = sizes_from(weights_);
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  return forward_batch(input).col(0);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs, ForwardCache* cache) const {
  if (inputs.rows() != input_size()) {
    throw Error(ErrorCode::kShapeMismatch, "input has " + std::to_string(inputs.rows()) +
                                               " rows, network expects " + std::to_string(input_size()));
  }
  if (cache) {
    cache->activations.resize(num_layers() + 1);
    cache->activations[0] = inputs;
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < num_layers()) {
      a = z.cwiseMax(0.0);
    } else {
      if (output_ == OutputActivation::kSoftmax) softmax_columns(z);
      a = std::move(z);
    }
    if (cache) cache->activations[l + 1] = a;
  }
  return a;
}

void Mlp::backpropagate(const ForwardCache& cache, const Eigen::MatrixXd& output_grad, Gradients& grads) const {
  const auto& acts = cache.activations;
  if (acts.size() != num_layers() + 1 || output_grad.rows() != output_size() ||
      output_grad.cols() != acts.back().cols()) {
    throw Error(ErrorCode::kShapeMismatch, "output gradient does not match forward cache");
  }
  grads.weights.resize(num_layers());
  grads.biases.resize(num_layers());

  // dLoss/dz for the output layer.
  Eigen::MatrixXd delta = output_grad;
  if (output_ == OutputActivation::kSoftmax) {
    const auto& s = acts.back();
    const Eigen::RowVectorXd dot = (s.array() * output_grad.array()).colwise().sum();
    delta = (s.array() * (output_grad.rowwise() - dot).array()).matrix();
  }
  for (std::size_t l = num_layers(); l-- > 0;) {
    grads.weights[l].noalias() = delta * acts[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd upstream = weights_[l].transpose() * delta;
    delta = (acts[l].array() > 0.0).select(upstream.array(), 0.0).matrix();
  }
}

Gradients Mlp::zero_gradients() const {
  Gradients g;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

double mse_loss(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) {
  if (prediction.size() != target.size() || prediction.size() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "mse_loss needs equal, non-empty lengths");
  }
  return (prediction - target).squaredNorm() / static_cast<double>(prediction.size());
}

double mse_backward(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                    Gradients& grads) {
  if (targets.rows() != net.output_size() || targets.cols() != inputs.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "targets do not match network output / batch");
  }
  ForwardCache cache;
  const Eigen::MatrixXd out = net.forward_batch(inputs, &cache);
  const Eigen::MatrixXd diff = out - targets;
  const double n = static_cast<double>(diff.size());
  net.backpropagate(cache, (2.0 / n) * diff, grads);
  return diff.squaredNorm() / n;
}

Gradients backward(const Mlp& net, const Eigen::VectorXd& input, const Eigen::VectorXd& target) {
  Gradients g;
  mse_backward(net, input, target, g);
  return g;
}

void sgd_step(Mlp& net, const Gradients& grads, double learning_rate) {
  check_grad_shapes(net, grads);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    net.weights()[l] -= learning_rate * grads.weights[l];
    net.biases()[l] -= learning_rate * grads.biases[l];
  }
}

nlohmann::json mlp_to_json(const Mlp& net) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.weights()[l];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    weights.push_back(flat);
    const auto& b = net.biases()[l];
    biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  }
  return {{"schema_version", kModelSchemaVersion},
          {"layer_sizes", net.layer_sizes()},
          {"output_activation", net.output_activation() == OutputActivation::kSoftmax ? "softmax" : "identity"},
          {"weights", weights},
          {"biases", biases}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw Error(ErrorCode::kCorruptModel, "model JSON lacks schema_version");
  }
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kModelSchemaVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model schema_version " + j.at("schema_version").dump() + ", expected " +
                    std::to_string(kModelSchemaVersion));
  }
  try {
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    const auto act = j.at("output_activation").get<std::string>();
    const auto flat_w = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto flat_b = j.at("biases").get<std::vector<std::vector<double>>>();
    if (act != "identity" && act != "softmax") throw Error(ErrorCode::kCorruptModel, "bad output_activation");
    if (sizes.size() < 2 || flat_w.size() != sizes.size() - 1 || flat_b.size() != flat_w.size()) {
      throw Error(ErrorCode::kCorruptModel, "layer count mismatch");
    }
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    for (std::size_t l = 0; l < flat_w.size(); ++l) {
      const int rows = sizes[l + 1];
      const int cols = sizes[l];
      if (rows < 1 || cols < 1 || flat_w[l].size() != static_cast<std::size_t>(rows) * cols ||
          flat_b[l].size() != static_cast<std::size_t>(rows)) {
        throw Error(ErrorCode::kCorruptModel, "parameter count mismatch at layer " + std::to_string(l));
      }
      Eigen::MatrixXd w(rows, cols);
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) w(r, c) = flat_w[l][static_cast<std::size_t>(r) * cols + c];
      }
      Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(flat_b[l].data(), rows);
      if (!w.allFinite() || !b.allFinite()) throw Error(ErrorCode::kCorruptModel, "non-finite parameter");
      weights.push_back(std::move(w));
      biases.push_back(std::move(b));
    }
    return Mlp(std::move(weights), std::move(biases),
               act == "softmax" ? OutputActivation::kSoftmax : OutputActivation::kIdentity);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptModel, e.what());
  }
}

void save_mlp(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << mlp_to_json(net).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kModelMissing, "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptModel, path.string() + ": " + e.what());
  }
  return mlp_from_json(j);
}

}  // namespace prefinfer
