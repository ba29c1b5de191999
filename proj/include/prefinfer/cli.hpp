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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace prefinfer::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kMissingArtifact = 3,
  kRuntime = 4,
};

// Artifact layout inside the output directory.
struct ArtifactPaths {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path train_window() const { return root / "data" / "train_window.json"; }
  std::filesystem::path eval_window() const { return root / "data" / "eval_window.json"; }
  std::filesystem::path agent_model() const { return root / "agent" / "dwmorl.json"; }
  std::filesystem::path agent_meta() const { return root / "agent" / "dwmorl.meta.json"; }
  std::filesystem::path demos() const { return root / "dwpi" / "demos.csv"; }
  std::filesystem::path dwpi_model() const { return root / "dwpi" / "model.json"; }
  std::filesystem::path dwpi_meta() const { return root / "dwpi" / "model.meta.json"; }
  std::filesystem::path validation_json() const { return root / "reports" / "validation.json"; }
  std::filesystem::path comparison_json() const { return root / "reports" / "comparison.json"; }
  std::filesystem::path validation_md() const { return root / "reports" / "validation.md"; }
  std::filesystem::path comparison_md() const { return root / "reports" / "comparison.md"; }
};

// Runs one CLI invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prefinfer::cli
