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

#include "prefinfer/dwpi.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "prefinfer/error.hpp"
#include "prefinfer/random.hpp"

namespace prefinfer {
namespace {

DemoRecord demonstrate(const QAgent& agent, const DataWindow& window, const EnvConfig& config,
                       const PreferenceWeights& w) {
  return {rollout(agent, w, window, config).total, w};
}

double parse_double(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw UnparseableRow(line, "bad number '" + field + "'");
  }
  if (used != field.size() || !std::isfinite(v)) throw UnparseableRow(line, "bad number '" + field + "'");
  return v;
}

double fold_mse(std::span<const DemoRecord> records, const DwpiHyper& hyper, std::uint64_t seed,
                std::size_t held_out) {
  std::vector<DemoRecord> train;
  train.reserve(records.size() - 1);
  for (std::size_t j = 0; j < records.size(); ++j) {
    if (j != held_out) train.push_back(records[j]);
  }
  const DwpiModel model = train_dwpi(train, hyper, derive_seed(seed, held_out));
  const PreferenceWeights p = infer(model, records[held_out].features);
  const double dc = p.cost - records[held_out].label.cost;
  const double df = p.comfort - records[held_out].label.comfort;
  return 0.5 * (dc * dc + df * df);
}

}  // namespace

void DwpiHyper::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, "dwpi: " + what); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (hidden_layers.empty()) fail("hidden_layers must be non-empty");
  for (int h : hidden_layers) {
    if (h < 1) fail("hidden layer sizes must be positive");
  }
}

nlohmann::json dwpi_hyper_to_json(const DwpiHyper& h) {
  return {{"epochs", h.epochs},
          {"batch_size", h.batch_size},
          {"learning_rate", h.learning_rate},
          {"hidden_layers", h.hidden_layers}};
}

DwpiHyper dwpi_hyper_from_json(const nlohmann::json& j) {
  DwpiHyper h;
  try {
    h.epochs = j.value("epochs", h.epochs);
    h.batch_size = j.value("batch_size", h.batch_size);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.hidden_layers = j.value("hidden_layers", h.hidden_layers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("dwpi config: ") + e.what());
  }
  h.validate();
  return h;
}

std::vector<PreferenceWeights> weight_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw Error(ErrorCode::kInvalidStep, "step must lie in (0, 1]");
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidStep, "1/step must be an integer");
  }
  const auto count = static_cast<int>(n);
  std::vector<PreferenceWeights> grid;
  grid.reserve(static_cast<std::size_t>(count) + 1);
  for (int k = 0; k <= count; ++k) {
    const double c = static_cast<double>(k) / count;
    grid.push_back({c, 1.0 - c});
  }
  return grid;
}

std::vector<DemoRecord> build_dataset(const QAgent& agent, const DataWindow& window, const EnvConfig& config,
                                      std::span<const PreferenceWeights> grid) {
  std::vector<DemoRecord> records(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    records[k] = demonstrate(agent, window, config, grid[k]);
  }
  return records;
}

std::vector<DemoRecord> build_dataset_serial(const QAgent& agent, const DataWindow& window,
                                             const EnvConfig& config, std::span<const PreferenceWeights> grid) {
  std::vector<DemoRecord> records;
  records.reserve(grid.size());
  for (const auto& w : grid) records.push_back(demonstrate(agent, window, config, w));
  return records;
}

FeatureScaler fit_scaler(std::span<const DemoRecord> records) {
  if (records.size() < 2) throw Error(ErrorCode::kInsufficientData, "scaler needs at least two records");
  FeatureScaler s;
  const auto n = static_cast<double>(records.size());
  for (const auto& r : records) {
    s.mean[0] += r.features.cost;
    s.mean[1] += r.features.comfort;
  }
  s.mean[0] /= n;
  s.mean[1] /= n;
  std::array<double, 2> var{0.0, 0.0};
  for (const auto& r : records) {
    var[0] += (r.features.cost - s.mean[0]) * (r.features.cost - s.mean[0]);
    var[1] += (r.features.comfort - s.mean[1]) * (r.features.comfort - s.mean[1]);
  }
  for (int k = 0; k < 2; ++k) {
    s.stddev[k] = std::sqrt(var[k] / n);
    if (!(s.stddev[k] > 1e-12)) {
      throw Error(ErrorCode::kDegenerateFeature,
                  std::string(k == 0 ? "cumulative cost" : "cumulative comfort") + " has zero variance");
    }
  }
  return s;
}

std::array<double, 2> apply_scaler(const FeatureScaler& scaler, const RewardVector& features) {
  return {(features.cost - scaler.mean[0]) / scaler.stddev[0],
          (features.comfort - scaler.mean[1]) / scaler.stddev[1]};
}

DwpiModel train_dwpi(std::span<const DemoRecord> records, const DwpiHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  if (records.size() < static_cast<std::size_t>(hyper.batch_size) || records.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "need at least batch_size records, got " +
                                                  std::to_string(records.size()));
  }
  DwpiModel model;
  model.scaler = fit_scaler(records);

  std::vector<int> sizes = {2};
  sizes.insert(sizes.end(), hyper.hidden_layers.begin(), hyper.hidden_layers.end());
  sizes.push_back(2);
  model.net = Mlp(sizes, OutputActivation::kSoftmax, derive_seed(seed, 0x0D31));

  const auto n = records.size();
  Eigen::MatrixXd inputs(2, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd targets(2, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = apply_scaler(model.scaler, records[i].features);
    const auto c = static_cast<Eigen::Index>(i);
    inputs(0, c) = x[0];
    inputs(1, c) = x[1];
    targets(0, c) = records[i].label.cost;
    targets(1, c) = records[i].label.comfort;
  }

  Rng rng(derive_seed(seed, 0x5EED));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Gradients grads;
  const auto batch = static_cast<std::size_t>(hyper.batch_size);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t m = std::min(batch, n - start);
      Eigen::MatrixXd x(2, static_cast<Eigen::Index>(m));
      Eigen::MatrixXd y(2, static_cast<Eigen::Index>(m));
      for (std::size_t j = 0; j < m; ++j) {
        x.col(static_cast<Eigen::Index>(j)) = inputs.col(static_cast<Eigen::Index>(order[start + j]));
        y.col(static_cast<Eigen::Index>(j)) = targets.col(static_cast<Eigen::Index>(order[start + j]));
      }
      mse_backward(model.net, x, y, grads);
      sgd_step(model.net, grads, hyper.learning_rate);
    }
  }
  return model;
}

PreferenceWeights infer(const DwpiModel& model, const RewardVector& demonstration) {
  const auto x = apply_scaler(model.scaler, demonstration);
  const Eigen::VectorXd out = model.net.forward(Eigen::Vector2d(x[0], x[1]));
  return {out(0), out(1)};
}

FitSummary evaluate(const DwpiModel& model, std::span<const DemoRecord> records) {
  FitSummary s;
  if (records.empty()) return s;
  for (const auto& r : records) {
    const PreferenceWeights p = infer(model, r.features);
    const double dc = p.cost - r.label.cost;
    const double df = p.comfort - r.label.comfort;
    s.mse += 0.5 * (dc * dc + df * df);
    s.mae_cost += std::abs(dc);
    s.mae_comfort += std::abs(df);
  }
  const auto n = static_cast<double>(records.size());
  s.mse /= n;
  s.mae_cost /= n;
  s.mae_comfort /= n;
  return s;
}

double leave_one_out_mse(std::span<const DemoRecord> records, const DwpiHyper& hyper, std::uint64_t seed) {
  std::vector<double> folds(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    folds[static_cast<std::size_t>(i)] = fold_mse(records, hyper, seed, static_cast<std::size_t>(i));
  }
  double total = 0.0;
  for (double f : folds) total += f;
  return total / static_cast<double>(records.size());
}

double leave_one_out_mse_serial(std::span<const DemoRecord> records, const DwpiHyper& hyper,
                                std::uint64_t seed) {
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) total += fold_mse(records, hyper, seed, i);
  return total / static_cast<double>(records.size());
}

void save_dataset(const std::filesystem::path& path, std::span<const DemoRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << "cum_cost,cum_comfort,w_cost,w_comf\n" << std::setprecision(17);
  for (const auto& r : records) {
    out << r.features.cost << ',' << r.features.comfort << ',' << r.label.cost << ',' << r.label.comfort << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

std::vector<DemoRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kArtifactMissing, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kEmptyFile, path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "cum_cost,cum_comfort,w_cost,w_comf") {
    throw Error(ErrorCode::kMissingColumn, "unexpected dataset header '" + line + "'");
  }
  std::vector<DemoRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4) throw UnparseableRow(line_no, "expected 4 fields");
    DemoRecord r{{parse_double(fields[0], line_no), parse_double(fields[1], line_no)},
                 {parse_double(fields[2], line_no), parse_double(fields[3], line_no)}};
    if (!r.label.valid()) throw UnparseableRow(line_no, "label is not on the simplex");
    records.push_back(r);
  }
  return records;
}

void save_dwpi(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path,
               const DwpiModel& model, const DwpiHyper& hyper, std::uint64_t seed) {
  save_mlp(model_path, model.net);
  const nlohmann::json meta = {
      {"hyper", dwpi_hyper_to_json(hyper)},
      {"seed", seed},
      {"scaler", {{"mean", model.scaler.mean}, {"std", model.scaler.stddev}}},
  };
  std::ofstream out(sidecar_path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + sidecar_path.string());
  out << meta.dump(2) << '\n';
}

DwpiModel load_dwpi(const std::filesystem::path& model_path, const std::filesystem::path& sidecar_path) {
  DwpiModel model;
  model.net = load_mlp(model_path);
  std::ifstream in(sidecar_path);
  if (!in) throw Error(ErrorCode::kModelMissing, "cannot read " + sidecar_path.string());
  try {
    const auto meta = nlohmann::json::parse(in);
    model.scaler.mean = meta.at("scaler").at("mean").get<std::array<double, 2>>();
    model.scaler.stddev = meta.at("scaler").at("std").get<std::array<double, 2>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptModel, sidecar_path.string() + ": " + e.what());
  }
  if (model.net.input_size() != 2 || model.net.output_size() != 2 ||
      model.net.output_activation() != OutputActivation::kSoftmax) {
    throw Error(ErrorCode::kCorruptModel, "inference model must be a 2 -> 2 softmax network");
  }
  return model;
}

}  // namespace prefinfer
