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
#include <filesystem>

#include "prefinfer/dwpi.hpp"
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

// Records whose features are a smooth invertible function of the label, so
// the regression target is exactly learnable.
std::vector<DemoRecord> smooth_records(int n) {
  std::vector<DemoRecord> out;
  for (int k = 0; k < n; ++k) {
    const double wc = static_cast<double>(k) / (n - 1);
    out.push_back({{-7.0 - 2.0 * (1.0 - wc), 3.0 * (1.0 - wc) * (1.0 - wc)}, PreferenceWeights::from_cost(wc)});
  }
  return out;
}

QAgent random_agent(std::uint64_t seed, const DataWindow& w) {
  return {Mlp({kExtendedStateSize, 16, kNumActions}, OutputActivation::kIdentity, seed), WindowStats::of(w)};
}

DwpiHyper quick_hyper(int epochs) {
  DwpiHyper h;
  h.epochs = epochs;
  return h;
}

}  // namespace

TEST(WeightGrid, Examples) {
  const auto g = weight_grid(0.5);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], (PreferenceWeights{0.0, 1.0}));
  EXPECT_EQ(g[1], (PreferenceWeights{0.5, 0.5}));
  EXPECT_EQ(g[2], (PreferenceWeights{1.0, 0.0}));
  const auto fine = weight_grid(0.01);
  ASSERT_EQ(fine.size(), 101u);
  for (std::size_t k = 0; k < fine.size(); ++k) {
    EXPECT_NEAR(fine[k].cost, 0.01 * static_cast<double>(k), 1e-12);
    EXPECT_NEAR(fine[k].cost + fine[k].comfort, 1.0, 1e-12);
  }
  EXPECT_EQ(code_of([] { weight_grid(0.3); }), ErrorCode::kInvalidStep);
  EXPECT_EQ(code_of([] { weight_grid(0.0); }), ErrorCode::kInvalidStep);
  EXPECT_EQ(code_of([] { weight_grid(1.5); }), ErrorCode::kInvalidStep);
}

TEST(Scaler, Examples) {
  const std::vector<DemoRecord> two = {{{0, 0}, {0.5, 0.5}}, {{2, 2}, {0.5, 0.5}}};
  const FeatureScaler s = fit_scaler(two);
  EXPECT_EQ(s.mean, (std::array<double, 2>{1, 1}));
  EXPECT_EQ(s.stddev, (std::array<double, 2>{1, 1}));
  EXPECT_EQ(apply_scaler(s, {1, 1}), (std::array<double, 2>{0, 0}));
  const std::vector<DemoRecord> same = {{{1, 1}, {0.5, 0.5}}, {{1, 1}, {0.5, 0.5}}};
  EXPECT_EQ(code_of([&] { fit_scaler(same); }), ErrorCode::kDegenerateFeature);
  EXPECT_EQ(code_of([&] { fit_scaler(std::span(two).first(1)); }), ErrorCode::kInsufficientData);
}

TEST(Scaler, StandardizesTrainingFeatures) {
  Rng rng(6);
  std::vector<DemoRecord> recs;
  for (int i = 0; i < 101; ++i) recs.push_back({{-20 * uniform01(rng), 3 * uniform01(rng)}, {0.5, 0.5}});
  const FeatureScaler s = fit_scaler(recs);
  double m0 = 0, m1 = 0, v0 = 0, v1 = 0;
  for (const auto& r : recs) {
    const auto z = apply_scaler(s, r.features);
    m0 += z[0];
    m1 += z[1];
    v0 += z[0] * z[0];
    v1 += z[1] * z[1];
  }
  EXPECT_NEAR(m0 / 101, 0.0, 1e-9);
  EXPECT_NEAR(m1 / 101, 0.0, 1e-9);
  EXPECT_NEAR(std::sqrt(v0 / 101), 1.0, 1e-9);
  EXPECT_NEAR(std::sqrt(v1 / 101), 1.0, 1e-9);
}

TEST(BuildDataset, OneRecordPerGridPointAndParallelMatchesSerial) {
  const auto w = synthesize(2, 1);
  const auto grid = weight_grid(0.01);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QAgent agent = random_agent(seed, w);
    const auto par = build_dataset(agent, w, EnvConfig{}, grid);
    ASSERT_EQ(par.size(), 101u);
    EXPECT_EQ(par, build_dataset_serial(agent, w, EnvConfig{}, grid));
    EXPECT_EQ(par, build_dataset(agent, w, EnvConfig{}, grid));
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(par[k].label, grid[k]);
  }
}

TEST(TrainDwpi, FitsALearnableMapping) {
  const auto recs = smooth_records(101);
  const DwpiModel m = train_dwpi(recs, DwpiHyper{}, 3);
  const FitSummary fit = evaluate(m, recs);
  EXPECT_LT(fit.mse, 0.02);
  EXPECT_LT(fit.mae_cost, 0.05);
  EXPECT_NEAR(fit.mae_cost, fit.mae_comfort, 1e-12);
}

TEST(TrainDwpi, DeterministicAndOnSimplex) {
  const auto recs = smooth_records(40);
  const DwpiModel a = train_dwpi(recs, quick_hyper(50), 8);
  const DwpiModel b = train_dwpi(recs, quick_hyper(50), 8);
  const DwpiModel c = train_dwpi(recs, quick_hyper(50), 9);
  EXPECT_EQ(a.net.weights(), b.net.weights());
  EXPECT_EQ(a.scaler, b.scaler);
  EXPECT_NE(a.net.weights(), c.net.weights());
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const PreferenceWeights w = infer(a, {-1e3 * uniform01(rng), 1e3 * uniform01(rng)});
    EXPECT_GE(w.cost, 0.0);
    EXPECT_GE(w.comfort, 0.0);
    EXPECT_NEAR(w.cost + w.comfort, 1.0, 1e-12);
  }
  EXPECT_EQ(code_of([&] { train_dwpi(std::span(recs).first(31), quick_hyper(5), 1); }),
            ErrorCode::kInsufficientData);
}

TEST(LeaveOneOut, ParallelMatchesSerial) {
  const auto recs = smooth_records(36);
  const DwpiHyper h = quick_hyper(20);
  const double par = leave_one_out_mse(recs, h, 4);
  EXPECT_EQ(par, leave_one_out_mse_serial(recs, h, 4));
  EXPECT_GE(par, 0.0);
}

TEST(Persistence, DatasetAndModelRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto recs = smooth_records(33);
  save_dataset(dir / "prefinfer_demos.csv", recs);
  EXPECT_EQ(load_dataset(dir / "prefinfer_demos.csv"), recs);

  const DwpiModel m = train_dwpi(recs, quick_hyper(10), 2);
  save_dwpi(dir / "prefinfer_dwpi.json", dir / "prefinfer_dwpi.meta.json", m, quick_hyper(10), 2);
  const DwpiModel back = load_dwpi(dir / "prefinfer_dwpi.json", dir / "prefinfer_dwpi.meta.json");
  EXPECT_EQ(back.scaler, m.scaler);
  for (const auto& r : recs) EXPECT_EQ(infer(back, r.features), infer(m, r.features));
  for (const char* f : {"prefinfer_demos.csv", "prefinfer_dwpi.json", "prefinfer_dwpi.meta.json"}) {
    std::filesystem::remove(dir / f);
  }
}
