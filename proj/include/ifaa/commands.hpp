// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IFAA_COMMANDS_HPP
#define IFAA_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ifaa::cmd {

// Exit codes shared by the CLI and the command functions:
//   0 success, 1 error, 2 completed via the empty-set-B fallback.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFallback = 2;

// CLI-level overrides; unset fields defer to the config file, which defers
// to the built-in defaults. The effective configuration is echoed in the
// manifest.
struct ConfigOverrides {
  std::optional<double> alpha;
  std::optional<int> refs;
  std::optional<int> perms;
  std::optional<int> bootstrap;
  std::optional<double> ci_level;
  std::optional<int> min_overlap;
  std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
  std::string scenario_file;
  std::string out_dir;
  bool quiet = false;
};

// Writes counts.csv (observed), covariates.csv, truth.csv, manifest.json.
int cmd_simulate(const SimulateOptions& opts);

struct AnalyzeOptions {
  std::string counts_path;
  std::string covariates_path;
  std::string config_path;  // may be empty
  std::string out_dir;
  std::vector<std::string> x_cols;  // may come from the config file instead
  std::vector<std::string> w_cols;
  ConfigOverrides overrides;
  unsigned threads = 0;  // 0 = auto
  bool quiet = false;
};

// validate -> phase 1 -> phase 2; writes phase1.json, estimates.csv,
// heatmap.csv, manifest.json.
int cmd_analyze(const AnalyzeOptions& opts);

struct BenchmarkOptions {
  std::string scenario_dir;
  std::string config_path;  // may be empty
  std::string out_dir;
  int replicates = 20;
  // name -> directory holding <scenario>.csv selection files
  std::vector<std::pair<std::string, std::string>> externals;
  ConfigOverrides overrides;
  unsigned threads = 0;
  bool quiet = false;
};

// Runs every .scn scenario in scenario_dir; writes report.csv, manifest.json.
int cmd_benchmark(const BenchmarkOptions& opts);

}  // namespace ifaa::cmd

#endif  // IFAA_COMMANDS_HPP
