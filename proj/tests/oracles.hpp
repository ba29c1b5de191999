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

// Independent reference computations used as test oracles. Nothing in here
// calls the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "prefinfer/datahub.hpp"
#include "prefinfer/env.hpp"
#include "prefinfer/nn.hpp"

namespace prefinfer::oracle {

struct Totals {
  double cost = 0.0;
  double comfort = 0.0;
};

// Straight-line evaluation of the two reward equations over one 24-hour day.
// run[h] != 0 requests the appliance at hour h.
inline Totals day_rewards(const DataWindow& w, int day, const std::vector<int>& run, double appliance_kw = 1.0,
                          int task_hours = 2, int comfort_end = 7, double scale = 10.0) {
  Totals t;
  int task = task_hours;
  for (int h = 0; h < 24; ++h) {
    const std::size_t i = static_cast<std::size_t>(day) * 24 + static_cast<std::size_t>(h);
    const bool on = run[static_cast<std::size_t>(h)] != 0 && task > 0;
    double load = w.background.values[i] - w.renewable.values[i];
    if (on) load += appliance_kw;
    if (load < 0.0) load = 0.0;
    t.cost -= scale * w.price.values[i] * load;
    if (on && h < comfort_end) t.comfort += task;
    if (on) task -= 1;
  }
  return t;
}

// Best cumulative cost over all C(24,2) two-hour daily schedules.
inline double best_two_hour_cost(const DataWindow& w, int day = 0) {
  double best = -1e300;
  for (int a = 0; a < 24; ++a) {
    for (int b = a + 1; b < 24; ++b) {
      std::vector<int> run(24, 0);
      run[static_cast<std::size_t>(a)] = run[static_cast<std::size_t>(b)] = 1;
      best = std::max(best, day_rewards(w, day, run).cost);
    }
  }
  return best;
}

// Mean squared error of a network on one sample, evaluated with a hand-rolled
// forward pass (ReLU hidden layers, identity or softmax head).
inline double sample_loss(const Mlp& net, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::VectorXd z = net.weights()[l] * a + net.biases()[l];
    if (l + 1 < net.num_layers()) {
      for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = z(k) > 0.0 ? z(k) : 0.0;
    } else if (net.output_activation() == OutputActivation::kSoftmax) {
      z = (z.array() - z.maxCoeff()).exp();
      z /= z.sum();
    }
    a = z;
  }
  return (a - y).squaredNorm() / static_cast<double>(y.size());
}

// Central finite differences of sample_loss with respect to every parameter.
inline Gradients finite_difference(Mlp net, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double h = 1e-5) {
  Gradients g = net.zero_gradients();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    auto& w = net.weights()[l];
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double keep = w.data()[i];
      w.data()[i] = keep + h;
      const double up = sample_loss(net, x, y);
      w.data()[i] = keep - h;
      const double down = sample_loss(net, x, y);
      w.data()[i] = keep;
      g.weights[l].data()[i] = (up - down) / (2.0 * h);
    }
    auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double keep = b(i);
      b(i) = keep + h;
      const double up = sample_loss(net, x, y);
      b(i) = keep - h;
      const double down = sample_loss(net, x, y);
      b(i) = keep;
      g.biases[l](i) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

// Largest relative error between two gradient sets; entries where both are
// below `floor` in magnitude are compared absolutely.
inline double max_relative_error(const Gradients& a, const Gradients& b, double floor = 1e-6) {
  double worst = 0.0;
  auto cmp = [&](double p, double q) {
    const double denom = std::max({std::abs(p), std::abs(q), floor});
    worst = std::max(worst, std::abs(p - q) / denom);
  };
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < a.weights[l].size(); ++i) cmp(a.weights[l].data()[i], b.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < a.biases[l].size(); ++i) cmp(a.biases[l](i), b.biases[l](i));
  }
  return worst;
}

}  // namespace prefinfer::oracle
