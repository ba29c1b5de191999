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

#include "prefinfer/experiments.hpp"

#include <cmath>
#include <exception>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "prefinfer/error.hpp"

namespace prefinfer {
namespace {

nlohmann::json reward_json(const RewardVector& r) { return {{"cost", r.cost}, {"comfort", r.comfort}}; }
RewardVector reward_from(const nlohmann::json& j) {
  return {j.at("cost").get<double>(), j.at("comfort").get<double>()};
}
nlohmann::json weights_json(const PreferenceWeights& w) { return {{"w_cost", w.cost}, {"w_comf", w.comfort}}; }
PreferenceWeights weights_from(const nlohmann::json& j) {
  return {j.at("w_cost").get<double>(), j.at("w_comf").get<double>()};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  // Avoid printing "-0.00".
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string pair_text(double a, double b, int digits) {
  return "[" + fixed(a, digits) + ", " + fixed(b, digits) + "]";
}

std::string hours_text(const std::vector<int>& hours) {
  std::string out;
  for (std::size_t i = 0; i < hours.size(); ++i) {
    if (i) out += " & ";
    out += std::to_string(hours[i]) + ":00-" + std::to_string(hours[i] + 1) + ":00";
  }
  return out;
}

void check_schema(const nlohmann::json& j, std::string_view kind) {
  if (!j.is_object() || j.value("kind", std::string()) != kind) {
    throw Error(ErrorCode::kInvalidArgument, "not a " + std::string(kind) + " report");
  }
  if (j.value("schema_version", 0) != kReportSchemaVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported report schema_version");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

}  // namespace

const ValidationRow* ValidationReport::find(std::string_view scenario) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario) return &r;
  }
  return nullptr;
}

const ComparisonRow* ComparisonReport::find(std::string_view scenario) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario) return &r;
  }
  return nullptr;
}

void score_validation(ValidationReport& report) {
  const auto* comfort = report.find(kAlwaysMaxComfort);
  const auto* cost = report.find(kAlwaysSaveCost);
  const auto* mixture = report.find(kMixture);
  report.comfort_margin_ok = report.cost_margin_ok = report.mixture_balanced = report.comfort_ordering_ok = false;
  if (!comfort || !cost || !mixture) return;

  const double comfort_margin = comfort->inferred.comfort - comfort->inferred.cost;
  const double cost_margin = cost->inferred.cost - cost->inferred.comfort;
  const double mixture_gap = std::abs(mixture->inferred.cost - mixture->inferred.comfort);
  report.comfort_margin_ok = comfort_margin >= kExtremeMargin;
  report.cost_margin_ok = cost_margin >= kExtremeMargin;
  report.mixture_balanced = mixture_gap < std::abs(comfort_margin) && mixture_gap < std::abs(cost_margin);
  report.comfort_ordering_ok = comfort->inferred.comfort > mixture->inferred.comfort &&
                               mixture->inferred.comfort > cost->inferred.comfort;
}

ValidationReport run_validation(const DwpiModel& model, const DataWindow& train_window, const EnvConfig& config) {
  ValidationReport report;
  for (const auto& schedule : builtin_schedules()) {
    ValidationRow row;
    row.scenario = schedule.name;
    row.run_hours = schedule.run_hours;
    row.features = demo_features(schedule, train_window, config);
    row.inferred = infer(model, row.features);
    report.rows.push_back(std::move(row));
  }
  score_validation(report);
  return report;
}

std::vector<ScenarioWeights> inferred_weights(const ValidationReport& report) {
  std::vector<ScenarioWeights> out;
  for (const auto& r : report.rows) out.push_back({r.scenario, r.inferred});
  return out;
}

void score_comparison(ComparisonReport& report) {
  const auto* comfort = report.find(kAlwaysMaxComfort);
  const auto* cost = report.find(kAlwaysSaveCost);
  const auto* mixture = report.find(kMixture);
  report.comfort_ordering_ok = report.cost_ordering_ok = report.save_cost_ok = false;
  if (!comfort || !cost || !mixture) return;
  report.comfort_ordering_ok =
      comfort->agent.comfort >= mixture->agent.comfort && mixture->agent.comfort >= cost->agent.comfort;
  report.cost_ordering_ok = comfort->agent.cost <= mixture->agent.cost && mixture->agent.cost <= cost->agent.cost;
  report.save_cost_ok = cost->agent.cost >= cost->user.cost - kCostSlack;
}

namespace {

void check_comparison_windows(const DataWindow& train_window, const DataWindow& eval_window) {
  if (eval_window.days != 7) {
    throw Error(ErrorCode::kWindowMismatch,
                "comparison needs a 7-day window, got " + std::to_string(eval_window.days));
  }
  if (train_window.days != 1) {
    throw Error(ErrorCode::kWindowMismatch, "comparison trains on a one-day window");
  }
}

ComparisonRow compare_scenario(const ScenarioWeights& inferred, const Schedule& schedule,
                               const DataWindow& train_window, const DataWindow& eval_window,
                               const EnvConfig& config, const AgentHyper& hyper, std::uint64_t seed,
                               const Mlp* initial) {
  const QAgent agent = train_fixed(train_window, config, hyper, inferred.weights, seed, initial);
  ComparisonRow row;
  row.scenario = inferred.scenario;
  row.weights = inferred.weights;
  row.agent = rollout(agent, inferred.weights, eval_window, config).total;
  row.user = run_schedule(schedule, eval_window, config);
  row.deviation = {std::abs(row.agent.cost - row.user.cost), std::abs(row.agent.comfort - row.user.comfort)};
  return row;
}

std::vector<Schedule> resolve_schedules(std::span<const ScenarioWeights> inferred) {
  std::vector<Schedule> schedules;
  for (const auto& s : inferred) schedules.push_back(builtin_schedule(s.scenario));
  return schedules;
}

}  // namespace

ComparisonReport run_comparison(std::span<const ScenarioWeights> inferred, const DataWindow& train_window,
                                const DataWindow& eval_window, const EnvConfig& config, const AgentHyper& hyper,
                                std::uint64_t seed, const Mlp* initial) {
  check_comparison_windows(train_window, eval_window);
  // Resolve every schedule before spawning threads so errors surface here.
  const std::vector<Schedule> schedules = resolve_schedules(inferred);
  ComparisonReport report;
  report.days = eval_window.days;
  report.rows.resize(inferred.size());
  std::vector<std::exception_ptr> errors(inferred.size());

  const auto n = static_cast<std::ptrdiff_t>(inferred.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      report.rows[k] = compare_scenario(inferred[k], schedules[k], train_window, eval_window, config, hyper,
                                        derive_seed(seed, k), initial);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  score_comparison(report);
  return report;
}

ComparisonReport run_comparison_serial(std::span<const ScenarioWeights> inferred, const DataWindow& train_window,
                                       const DataWindow& eval_window, const EnvConfig& config,
                                       const AgentHyper& hyper, std::uint64_t seed, const Mlp* initial) {
  check_comparison_windows(train_window, eval_window);
  const std::vector<Schedule> schedules = resolve_schedules(inferred);
  ComparisonReport report;
  report.days = eval_window.days;
  for (std::size_t k = 0; k < inferred.size(); ++k) {
    report.rows.push_back(compare_scenario(inferred[k], schedules[k], train_window, eval_window, config, hyper,
                                           derive_seed(seed, k), initial));
  }
  score_comparison(report);
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw Error(ErrorCode::kInvalidArgument, "unknown report format '" + std::string(name) + "'");
}

nlohmann::json report_to_json(const ValidationReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"scenario", r.scenario},
                    {"run_hours", r.run_hours},
                    {"features", reward_json(r.features)},
                    {"inferred", weights_json(r.inferred)}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "validation"},
          {"rows", rows},
          {"checks",
           {{"comfort_margin", report.comfort_margin_ok},
            {"cost_margin", report.cost_margin_ok},
            {"mixture_balanced", report.mixture_balanced},
            {"comfort_ordering", report.comfort_ordering_ok}}},
          {"passed", report.passed()}};
}

nlohmann::json report_to_json(const ComparisonReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"scenario", r.scenario},
                    {"weights", weights_json(r.weights)},
                    {"user", reward_json(r.user)},
                    {"agent", reward_json(r.agent)},
                    {"deviation", reward_json(r.deviation)}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "comparison"},
          {"days", report.days},
          {"rows", rows},
          {"checks",
           {{"comfort_ordering", report.comfort_ordering_ok},
            {"cost_ordering", report.cost_ordering_ok},
            {"save_cost_not_worse", report.save_cost_ok}}},
          {"passed", report.passed()}};
}

ValidationReport validation_from_json(const nlohmann::json& j) {
  check_schema(j, "validation");
  ValidationReport report;
  try {
    for (const auto& r : j.at("rows")) {
      report.rows.push_back({r.at("scenario").get<std::string>(), r.at("run_hours").get<std::vector<int>>(),
                             reward_from(r.at("features")), weights_from(r.at("inferred"))});
    }
    const auto& c = j.at("checks");
    report.comfort_margin_ok = c.at("comfort_margin").get<bool>();
    report.cost_margin_ok = c.at("cost_margin").get<bool>();
    report.mixture_balanced = c.at("mixture_balanced").get<bool>();
    report.comfort_ordering_ok = c.at("comfort_ordering").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("validation report: ") + e.what());
  }
  return report;
}

ComparisonReport comparison_from_json(const nlohmann::json& j) {
  check_schema(j, "comparison");
  ComparisonReport report;
  try {
    report.days = j.at("days").get<int>();
    for (const auto& r : j.at("rows")) {
      report.rows.push_back({r.at("scenario").get<std::string>(), weights_from(r.at("weights")),
                             reward_from(r.at("user")), reward_from(r.at("agent")),
                             reward_from(r.at("deviation"))});
    }
    const auto& c = j.at("checks");
    report.comfort_ordering_ok = c.at("comfort_ordering").get<bool>();
    report.cost_ordering_ok = c.at("cost_ordering").get<bool>();
    report.save_cost_ok = c.at("save_cost_not_worse").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("comparison report: ") + e.what());
  }
  return report;
}

std::string render_report(const ValidationReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return report_to_json(report).dump(2) + "\n";
  std::ostringstream md;
  md << "## Inference validation\n\n"
     << "| Scenario | Demonstration - running at | Demonstration [sum r_cost, sum r_comf] | [w_cost, w_comf] |\n"
     << "|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    md << "| " << r.scenario << " | " << hours_text(r.run_hours) << " | "
       << pair_text(r.features.cost, r.features.comfort, 2) << " | "
       << pair_text(r.inferred.cost, r.inferred.comfort, 2) << " |\n";
  }
  auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
  md << "\n- comfort margin >= 0.2: " << mark(report.comfort_margin_ok)
     << "\n- cost margin >= 0.2: " << mark(report.cost_margin_ok)
     << "\n- mixture balanced: " << mark(report.mixture_balanced)
     << "\n- w_comf ordering: " << mark(report.comfort_ordering_ok) << "\n";
  return md.str();
}

std::string render_report(const ComparisonReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return report_to_json(report).dump(2) + "\n";
  std::ostringstream md;
  md << "## Simulated comparison (" << report.days << " days)\n\n"
     << "| Scenario | Inferred [w_cost, w_comf] | User-generated Result | Agent-generated Result | Deviation (abs) |\n"
     << "|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    md << "| " << r.scenario << " | " << pair_text(r.weights.cost, r.weights.comfort, 2) << " | "
       << pair_text(r.user.cost, r.user.comfort, 2) << " | " << pair_text(r.agent.cost, r.agent.comfort, 2)
       << " | " << pair_text(r.deviation.cost, r.deviation.comfort, 2) << " |\n";
  }
  auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
  md << "\n- agent comfort ordering: " << mark(report.comfort_ordering_ok)
     << "\n- agent cost ordering: " << mark(report.cost_ordering_ok)
     << "\n- save-cost agent not worse than user: " << mark(report.save_cost_ok) << "\n";
  return md.str();
}

void emit_report(const ValidationReport& report, ReportFormat format, const std::filesystem::path& path) {
  write_text(path, render_report(report, format));
}

void emit_report(const ComparisonReport& report, ReportFormat format, const std::filesystem::path& path) {
  write_text(path, render_report(report, format));
}

void emit_report(const ValidationReport& report, std::string_view format, const std::filesystem::path& path) {
  emit_report(report, parse_report_format(format), path);
}

void emit_report(const ComparisonReport& report, std::string_view format, const std::filesystem::path& path) {
  emit_report(report, parse_report_format(format), path);
}

}  // namespace prefinfer
