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

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "prefinfer/error.hpp"
#include "prefinfer/experiments.hpp"

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

ValidationReport validation_with(double comfort_wc, double cost_wc, double mixture_wc) {
  ValidationReport r;
  r.rows = {{"always_max_comfort", {2, 3}, {-8.77, 3}, PreferenceWeights::from_cost(comfort_wc)},
            {"always_save_cost", {10, 14}, {-7.26, 0}, PreferenceWeights::from_cost(cost_wc)},
            {"mixture", {6, 10}, {-8.15, 2}, PreferenceWeights::from_cost(mixture_wc)}};
  score_validation(r);
  return r;
}

ComparisonReport comparison_with(RewardVector comfort, RewardVector cost, RewardVector mixture,
                                  double user_cost = -50.0) {
  ComparisonReport r;
  r.days = 7;
  r.rows = {{"always_max_comfort", {0.25, 0.75}, {-63.0, 21}, comfort, {}},
            {"always_save_cost", {0.8, 0.2}, {user_cost, 0}, cost, {}},
            {"mixture", {0.55, 0.45}, {-58.0, 14}, mixture, {}}};
  for (auto& row : r.rows) {
    row.deviation = {std::abs(row.agent.cost - row.user.cost), std::abs(row.agent.comfort - row.user.comfort)};
  }
  score_comparison(r);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ScoreValidation, Criteria) {
  EXPECT_TRUE(validation_with(0.26, 0.79, 0.44).passed());
  const auto weak = validation_with(0.45, 0.79, 0.5);
  EXPECT_FALSE(weak.comfort_margin_ok);
  EXPECT_TRUE(weak.cost_margin_ok);
  // Mixture gap 0.3 is not below the comfort gap 0.3.
  const auto wide = validation_with(0.35, 0.9, 0.65);
  EXPECT_FALSE(wide.mixture_balanced);
  const auto unordered = validation_with(0.2, 0.8, 0.15);
  EXPECT_FALSE(unordered.comfort_ordering_ok);
  EXPECT_FALSE(unordered.passed());
  EXPECT_EQ(validation_with(0.26, 0.79, 0.44).rows.size(), 3u);
}

TEST(ScoreComparison, Criteria) {
  EXPECT_TRUE(comparison_with({-63, 21}, {-50, 0}, {-57, 14}).passed());
  EXPECT_TRUE(comparison_with({-63, 21}, {-50.4, 0}, {-57, 14}).save_cost_ok);
  EXPECT_FALSE(comparison_with({-63, 21}, {-50.6, 0}, {-57, 14}).save_cost_ok);
  EXPECT_FALSE(comparison_with({-63, 14}, {-50, 0}, {-57, 21}).comfort_ordering_ok);
  EXPECT_FALSE(comparison_with({-56, 21}, {-50, 0}, {-57, 14}).cost_ordering_ok);
}

TEST(Reports, JsonRoundTrip) {
  const auto v = validation_with(0.26, 0.79, 0.44);
  const auto v2 = validation_from_json(report_to_json(v));
  EXPECT_EQ(report_to_json(v2), report_to_json(v));
  EXPECT_EQ(v2.rows[1].run_hours, (std::vector<int>{10, 14}));
  EXPECT_EQ(v2.rows[2].inferred, v.rows[2].inferred);
  EXPECT_EQ(report_to_json(v)["kind"], "validation");
  EXPECT_EQ(report_to_json(v)["schema_version"], kReportSchemaVersion);

  const auto c = comparison_with({-63, 21}, {-50, 0}, {-57, 14});
  const auto c2 = comparison_from_json(report_to_json(c));
  EXPECT_EQ(report_to_json(c2), report_to_json(c));
  EXPECT_EQ(c2.rows[0].agent, c.rows[0].agent);
  EXPECT_EQ(c2.passed(), c.passed());

  EXPECT_EQ(code_of([&] { comparison_from_json(report_to_json(v)); }), ErrorCode::kInvalidArgument);
}

TEST(Reports, MarkdownHasOneRowPerScenario) {
  const std::string md = render_report(validation_with(0.26, 0.79, 0.44), ReportFormat::kMarkdown);
  for (const char* name : {"| always_max_comfort |", "| always_save_cost |", "| mixture |"}) {
    EXPECT_NE(md.find(name), std::string::npos) << name;
  }
  EXPECT_NE(md.find("2:00-3:00 & 3:00-4:00"), std::string::npos);
  EXPECT_NE(md.find("[0.26, 0.74]"), std::string::npos);
  const std::string cm = render_report(comparison_with({-63, 21}, {-50, 0}, {-57, 14}), ReportFormat::kMarkdown);
  EXPECT_NE(cm.find("| always_save_cost | [0.80, 0.20] | [-50.00, 0.00] | [-50.00, 0.00] | [0.00, 0.00] |"),
            std::string::npos)
      << cm;
}

TEST(Reports, FormatNames) {
  EXPECT_EQ(parse_report_format("json"), ReportFormat::kJson);
  EXPECT_EQ(parse_report_format("markdown"), ReportFormat::kMarkdown);
  EXPECT_EQ(parse_report_format("md"), ReportFormat::kMarkdown);
  EXPECT_EQ(code_of([] { parse_report_format("xml"); }), ErrorCode::kInvalidArgument);
}

TEST(Reports, EmitWritesOnlyKnownFormats) {
  const auto dir = std::filesystem::temp_directory_path() / "prefinfer_reports";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto v = validation_with(0.26, 0.79, 0.44);
  EXPECT_EQ(code_of([&] { emit_report(v, "yaml", dir / "v.yaml"); }), ErrorCode::kInvalidArgument);
  EXPECT_FALSE(std::filesystem::exists(dir / "v.yaml"));
  emit_report(v, "json", dir / "v.json");
  EXPECT_EQ(report_to_json(validation_from_json(nlohmann::json::parse(slurp(dir / "v.json")))),
            report_to_json(v));
  emit_report(v, ReportFormat::kMarkdown, dir / "v.md");
  EXPECT_EQ(slurp(dir / "v.md"), render_report(v, ReportFormat::kMarkdown));
  EXPECT_EQ(code_of([&] { emit_report(v, ReportFormat::kJson, dir / "missing" / "v.json"); }),
            ErrorCode::kIoFailure);
  std::filesystem::remove_all(dir);
}

TEST(RunValidation, ThreeRowsOnSimplex) {
  std::vector<DemoRecord> recs;
  for (int k = 0; k <= 40; ++k) {
    const double wc = k / 40.0;
    recs.push_back({{-7.0 - 2.0 * (1.0 - wc), 3.0 * (1.0 - wc)}, PreferenceWeights::from_cost(wc)});
  }
  DwpiHyper h;
  h.epochs = 100;
  const DwpiModel m = train_dwpi(recs, h, 1);
  const auto report = run_validation(m, synthesize(1, 1), EnvConfig{});
  ASSERT_EQ(report.rows.size(), 3u);
  for (const auto& row : report.rows) EXPECT_NEAR(row.inferred.cost + row.inferred.comfort, 1.0, 1e-12);
  EXPECT_EQ(report.find("mixture")->run_hours, (std::vector<int>{6, 10}));
  EXPECT_EQ(code_of([&] { run_validation(m, synthesize(1, 2), EnvConfig{}); }), ErrorCode::kWindowMismatch);
}

TEST(RunComparison, WindowChecksAndThreadIndependence) {
  const std::vector<ScenarioWeights> weights = {
      {"always_max_comfort", {0.2, 0.8}}, {"always_save_cost", {0.9, 0.1}}, {"mixture", {0.5, 0.5}}};
  AgentHyper h;
  h.episodes = 40;
  const auto train = synthesize(1, 1);
  const auto eval = synthesize(2, 7);
  EXPECT_EQ(code_of([&] { run_comparison(weights, train, synthesize(2, 6), EnvConfig{}, h, 1); }),
            ErrorCode::kWindowMismatch);
  EXPECT_EQ(code_of([&] { run_comparison(weights, eval, eval, EnvConfig{}, h, 1); }), ErrorCode::kWindowMismatch);

  omp_set_num_threads(1);
  const auto serial = run_comparison(weights, train, eval, EnvConfig{}, h, 5);
  omp_set_num_threads(3);
  const auto parallel = run_comparison(weights, train, eval, EnvConfig{}, h, 5);
  EXPECT_EQ(report_to_json(serial), report_to_json(parallel));
  EXPECT_EQ(report_to_json(run_comparison_serial(weights, train, eval, EnvConfig{}, h, 5)), report_to_json(serial));
  const QAgent warm = train_dwmorl(train, EnvConfig{}, h, 2);
  omp_set_num_threads(3);
  EXPECT_EQ(report_to_json(run_comparison(weights, train, eval, EnvConfig{}, h, 5, &warm.q_net)),
            report_to_json(run_comparison_serial(weights, train, eval, EnvConfig{}, h, 5, &warm.q_net)));
  ASSERT_EQ(serial.rows.size(), 3u);
  EXPECT_EQ(serial.days, 7);
  EXPECT_EQ(serial.find("mixture")->user, run_schedule(builtin_schedule("mixture"), eval, EnvConfig{}));
}
