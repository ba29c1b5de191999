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

#include "prefinfer/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "prefinfer/agent.hpp"
#include "prefinfer/datahub.hpp"
#include "prefinfer/dwpi.hpp"
#include "prefinfer/error.hpp"
#include "prefinfer/experiments.hpp"
#include "prefinfer/run_config.hpp"
#include "prefinfer/scenarios.hpp"

namespace prefinfer::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
  std::string format = "json";
  std::string schedule;
  std::string weights;
  int repeat = 1;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigInvalid:
      return kConfig;
    case ErrorCode::kArtifactMissing:
    case ErrorCode::kModelMissing:
      return kMissingArtifact;
    default:
      return kRuntime;
  }
}

PreferenceWeights parse_weights(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--weights expects W_COST,W_COMF");
  PreferenceWeights w;
  try {
    w = {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "--weights expects two numbers");
  }
  if (!w.valid()) throw Error(ErrorCode::kInvalidArgument, "--weights must be non-negative and sum to 1");
  return w;
}

std::string weights_text(const PreferenceWeights& w) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << "[" << w.cost << ", " << w.comfort << "]";
  return s.str();
}

class Session {
 public:
  Session(Options options, std::ostream& out) : opt_(std::move(options)), out_(out) {}

  void resolve(bool load_config = true) {
    const char* env_out = std::getenv("PREFINFER_OUT");
    const bool out_overridden = !opt_.out.empty() || (env_out && *env_out);
    const fs::path early_root = !opt_.out.empty() ? fs::path(opt_.out)
                                : (env_out && *env_out) ? fs::path(env_out)
                                                        : fs::path(cfg_.out_dir);
    if (load_config) {
      if (!opt_.config.empty()) {
        cfg_ = load_run_config(opt_.config);
      } else if (fs::exists(ArtifactPaths{early_root}.config())) {
        cfg_ = load_run_config(ArtifactPaths{early_root}.config());
      }
    }
    if (opt_.seed) cfg_.seed = *opt_.seed;
    if (out_overridden) cfg_.out_dir = early_root.string();
    cfg_.validate();
    paths_ = ArtifactPaths{cfg_.out_dir};
  }

  const RunConfig& config() const { return cfg_; }
  RunConfig& config() { return cfg_; }
  const ArtifactPaths& paths() const { return paths_; }
  void set_root(const fs::path& root) {
    cfg_.out_dir = root.string();
    paths_ = ArtifactPaths{root};
  }

  int config_init() {
    const fs::path target = opt_.config.empty() ? paths_.config() : fs::path(opt_.config);
    guard({target});
    save_run_config(target, cfg_);
    out_ << "wrote " << target.string() << "\n";
    return kOk;
  }

  int data_prepare() {
    guard({paths_.train_window(), paths_.eval_window()});
    const Windows w = prepare_windows(cfg_);
    save_window(paths_.train_window(), w.train);
    save_window(paths_.eval_window(), w.eval);
    out_ << "data: train window 1 day, eval window " << w.eval.days << " days -> "
         << paths_.train_window().parent_path().string() << "\n";
    return kOk;
  }

  int train_agent() {
    require({paths_.train_window()}, "run `data prepare` first");
    guard({paths_.agent_model(), paths_.agent_meta()});
    const DataWindow train = load_window(paths_.train_window());
    const auto seed = cfg_.stage_seed(SeedStream::kAgent);
    const auto t0 = std::chrono::steady_clock::now();
    const QAgent agent = train_dwmorl(train, cfg_.env, cfg_.agent, seed);
    save_agent(paths_.agent_model(), paths_.agent_meta(), agent, {cfg_.agent, seed, std::nullopt});
    out_ << "train-agent: " << cfg_.agent.episodes << " episodes in " << seconds_since(t0) << " s\n";
    return kOk;
  }

  int gen_demos() {
    require({paths_.train_window(), paths_.agent_model(), paths_.agent_meta()}, "run `train-agent` first");
    guard({paths_.demos()});
    const DataWindow train = load_window(paths_.train_window());
    const QAgent agent = load_agent(paths_.agent_model(), paths_.agent_meta());
    const auto grid = weight_grid(cfg_.grid_step);
    const auto records = build_dataset(agent, train, cfg_.env, grid);
    save_dataset(paths_.demos(), records);
    out_ << "gen-demos: " << records.size() << " demonstrations -> " << paths_.demos().string() << "\n";
    return kOk;
  }

  int train_dwpi_cmd() {
    require({paths_.agent_model(), paths_.agent_meta()}, "run `train-agent` first");
    require({paths_.demos()}, "run `gen-demos` first");
    guard({paths_.dwpi_model(), paths_.dwpi_meta()});
    const auto records = load_dataset(paths_.demos());
    const auto seed = cfg_.stage_seed(SeedStream::kDwpi);
    const DwpiModel model = train_dwpi(records, cfg_.dwpi, seed);
    save_dwpi(paths_.dwpi_model(), paths_.dwpi_meta(), model, cfg_.dwpi, seed);
    const FitSummary fit = evaluate(model, records);
    out_ << "train-dwpi: training MSE " << fit.mse << ", MAE [" << fit.mae_cost << ", " << fit.mae_comfort
         << "]\n";
    return kOk;
  }

  int infer_cmd() {
    require({paths_.dwpi_model(), paths_.dwpi_meta()}, "run `train-dwpi` first");
    require({paths_.train_window()}, "run `data prepare` first");
    const DwpiModel model = load_dwpi(paths_.dwpi_model(), paths_.dwpi_meta());
    const DataWindow train = load_window(paths_.train_window());
    std::vector<Schedule> schedules;
    if (!opt_.schedule.empty()) {
      schedules.push_back(parse_schedule(opt_.schedule));
    } else {
      schedules = builtin_schedules();
    }
    const ReportFormat format = parse_report_format(opt_.format);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : schedules) {
      const RewardVector f = demo_features(s, train, cfg_.env);
      const PreferenceWeights w = infer(model, f);
      if (format == ReportFormat::kJson) {
        rows.push_back({{"scenario", s.name}, {"run_hours", s.run_hours}, {"w_cost", w.cost}, {"w_comf", w.comfort}});
      } else {
        out_ << s.name << " " << weights_text(w) << "\n";
      }
    }
    if (format == ReportFormat::kJson) out_ << rows.dump(2) << "\n";
    return kOk;
  }

  int validate_cmd() {
    require({paths_.dwpi_model(), paths_.dwpi_meta()}, "run `train-dwpi` first");
    require({paths_.train_window()}, "run `data prepare` first");
    const ReportFormat format = parse_report_format(opt_.format);
    guard({paths_.validation_json()});
    const DwpiModel model = load_dwpi(paths_.dwpi_model(), paths_.dwpi_meta());
    const ValidationReport report = run_validation(model, load_window(paths_.train_window()), cfg_.env);
    fs::create_directories(paths_.validation_json().parent_path());
    emit_report(report, ReportFormat::kJson, paths_.validation_json());
    out_ << render_report(report, format);
    return kOk;
  }

  int compare_cmd() {
    require({paths_.train_window(), paths_.eval_window()}, "run `data prepare` first");
    if (opt_.weights.empty()) require({paths_.validation_json()}, "run `validate` first");
    const ReportFormat format = parse_report_format(opt_.format);
    guard({paths_.comparison_json()});
    std::vector<ScenarioWeights> weights;
    if (!opt_.weights.empty()) {
      const PreferenceWeights w = parse_weights(opt_.weights);
      for (const auto& s : builtin_schedules()) weights.push_back({s.name, w});
    } else {
      weights = inferred_weights(validation_from_json(read_json(paths_.validation_json())));
    }
    std::optional<QAgent> warm;
    if (cfg_.comparison_warm_start) {
      require({paths_.agent_model(), paths_.agent_meta()}, "run `train-agent` first");
      warm = load_agent(paths_.agent_model(), paths_.agent_meta());
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ComparisonReport report =
        run_comparison(weights, load_window(paths_.train_window()), load_window(paths_.eval_window()), cfg_.env,
                       cfg_.agent, cfg_.stage_seed(SeedStream::kComparison), warm ? &warm->q_net : nullptr);
    fs::create_directories(paths_.comparison_json().parent_path());
    emit_report(report, ReportFormat::kJson, paths_.comparison_json());
    out_ << render_report(report, format);
    out_ << "compare: " << seconds_since(t0) << " s\n";
    return kOk;
  }

  int report_cmd() {
    require({paths_.validation_json(), paths_.comparison_json()}, "run `validate` and `compare` first");
    const ReportFormat format = parse_report_format(opt_.format);
    const auto validation = validation_from_json(read_json(paths_.validation_json()));
    const auto comparison = comparison_from_json(read_json(paths_.comparison_json()));
    if (format == ReportFormat::kMarkdown) {
      guard({paths_.validation_md(), paths_.comparison_md()});
      emit_report(validation, format, paths_.validation_md());
      emit_report(comparison, format, paths_.comparison_md());
    }
    out_ << render_report(validation, format) << render_report(comparison, format);
    return kOk;
  }

  int run_all() {
    guard({paths_.config(), paths_.train_window(), paths_.eval_window(), paths_.agent_model(), paths_.demos(),
           paths_.dwpi_model(), paths_.validation_json(), paths_.comparison_json(), paths_.validation_md(),
           paths_.comparison_md()});
    // Every stage below has been cleared by the guard above.
    const bool force = opt_.force;
    opt_.force = true;
    fs::create_directories(paths_.root);
    save_run_config(paths_.config(), cfg_);
    const std::string format = opt_.format;
    opt_.format = "markdown";
    for (const auto& stage : {&Session::data_prepare, &Session::train_agent, &Session::gen_demos,
                              &Session::train_dwpi_cmd, &Session::validate_cmd, &Session::compare_cmd,
                              &Session::report_cmd}) {
      (this->*stage)();
    }
    opt_.force = force;
    opt_.format = format;
    return kOk;
  }

 private:
  static std::string seconds_since(std::chrono::steady_clock::time_point t0) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1)
      << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s.str();
  }

  static nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kArtifactMissing, "cannot read " + path.string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
    }
  }

  void require(std::initializer_list<fs::path> inputs, const std::string& hint) const {
    for (const auto& p : inputs) {
      if (!fs::exists(p)) throw Error(ErrorCode::kArtifactMissing, p.string() + " not found; " + hint);
    }
  }

  void guard(std::initializer_list<fs::path> outputs) const {
    for (const auto& p : outputs) {
      if (!opt_.force && fs::exists(p)) {
        throw Error(ErrorCode::kIoFailure, p.string() + " exists; pass --force to overwrite");
      }
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
    }
  }

  Options opt_;
  std::ostream& out_;
  RunConfig cfg_;
  ArtifactPaths paths_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Preference inference from demonstrations for residential energy use", "prefinfer"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "Run configuration JSON");
  app.add_option("--seed", opt.seed, "Master seed");
  app.add_option("--out", opt.out, "Output directory (overrides PREFINFER_OUT and the config)");
  app.add_flag("--force", opt.force, "Overwrite existing artifacts");
  app.add_option("--format", opt.format, "Report format: json or markdown");
  app.add_option("--schedule", opt.schedule, "Custom demonstration hours, e.g. 2,3");
  app.add_option("--weights", opt.weights, "Fixed weights W_COST,W_COMF for compare");
  app.add_option("--repeat", opt.repeat, "run-all: repeat over N consecutive seeds")->check(CLI::PositiveNumber);

  auto* config_cmd = app.add_subcommand("config", "Configuration helpers")->require_subcommand(1);
  auto* config_init = config_cmd->add_subcommand("init", "Write the default configuration");
  auto* data_cmd = app.add_subcommand("data", "Data preparation")->require_subcommand(1);
  auto* data_prepare = data_cmd->add_subcommand("prepare", "Build the 1-day training and 7-day evaluation windows");
  auto* train_agent = app.add_subcommand("train-agent", "Train the weight-conditioned DQN agent");
  auto* gen_demos = app.add_subcommand("gen-demos", "Sweep the weight grid and record demonstrations");
  auto* train_dwpi_cmd = app.add_subcommand("train-dwpi", "Train the preference inference model");
  auto* infer_cmd = app.add_subcommand("infer", "Infer weights for built-in or --schedule demonstrations");
  auto* validate_cmd = app.add_subcommand("validate", "Inference validation on the three scenarios");
  auto* compare_cmd = app.add_subcommand("compare", "Simulated 7-day comparison against the rule-based users");
  auto* report_cmd = app.add_subcommand("report", "Render stored reports");
  auto* run_all_cmd = app.add_subcommand("run-all", "Run every stage end to end");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  config_init->fallthrough();
  data_prepare->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (opt.format != "json" && opt.format != "markdown" && opt.format != "md") {
      err << "error: unknown --format '" << opt.format << "'\n";
      return kUsage;
    }
    Session session(opt, out);
    if (config_init->parsed()) {
      session.resolve(!opt.config.empty() && std::filesystem::exists(opt.config));
      return session.config_init();
    }
    session.resolve();
    if (data_prepare->parsed()) return session.data_prepare();
    if (train_agent->parsed()) return session.train_agent();
    if (gen_demos->parsed()) return session.gen_demos();
    if (train_dwpi_cmd->parsed()) return session.train_dwpi_cmd();
    if (infer_cmd->parsed()) return session.infer_cmd();
    if (validate_cmd->parsed()) return session.validate_cmd();
    if (compare_cmd->parsed()) return session.compare_cmd();
    if (report_cmd->parsed()) return session.report_cmd();
    if (run_all_cmd->parsed()) {
      if (opt.repeat == 1) return session.run_all();
      const std::filesystem::path root = session.paths().root;
      const std::uint64_t first = session.config().seed;
      for (int i = 0; i < opt.repeat; ++i) {
        Session repeat(opt, out);
        repeat.resolve();
        repeat.config().seed = first + static_cast<std::uint64_t>(i);
        repeat.set_root(root / ("seed_" + std::to_string(first + static_cast<std::uint64_t>(i))));
        out << "== seed " << repeat.config().seed << "\n";
        repeat.run_all();
      }
      return kOk;
    }
    err << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kUsage : exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace prefinfer::cli
