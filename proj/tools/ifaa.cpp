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

// ifaa: two-phase association analysis for absolute microbial abundance.
//
//   ifaa simulate <scenario.scn> --out DIR
//   ifaa analyze <counts.csv> <covariates.csv> --x-cols a,b --out DIR
//   ifaa benchmark <scenario_dir> --replicates 20 --out DIR
//
// Exit codes: 0 success, 1 error, 2 analyze fell back to a non-set-B
// reference because set B was empty.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ifaa/commands.hpp"
#include "ifaa/version.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    std::string piece = csv.substr(start, comma - start);
    if (!piece.empty()) out.push_back(piece);
    start = comma + 1;
  }
  return out;
}

void add_override_flags(CLI::App* app, ifaa::cmd::ConfigOverrides& ov,
                        unsigned& threads) {
  app->add_option("--alpha", ov.alpha, "FWER for taxa selection, in (0,1)");
  app->add_option("--refs", ov.refs, "number of random reference taxa R");
  app->add_option("--perms", ov.perms, "number of permutations P");
  app->add_option("--bootstrap", ov.bootstrap, "bootstrap replicates");
  app->add_option("--ci-level", ov.ci_level, "confidence level, in (0,1)");
  app->add_option("--min-overlap", ov.min_overlap,
                  "minimum paired nonzero samples per ratio regression");
  app->add_option("--seed", ov.seed, "master seed");
  app->add_option("--threads", threads,
                  "worker threads (default: all cores, or IFAA_THREADS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"association analysis for absolute microbial abundance"};
  app.set_version_flag("--version", std::string("ifaa ") + ifaa::kVersion);
  app.require_subcommand(1);

  ifaa::cmd::SimulateOptions sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "generate a benchmark dataset");
  simulate->add_option("scenario", sim.scenario_file, "scenario .scn file")
      ->required();
  simulate->add_option("--out", sim.out_dir, "output directory")->required();
  simulate->add_flag("--quiet", sim.quiet, "suppress progress output");

  ifaa::cmd::AnalyzeOptions an;
  std::string x_cols_csv, w_cols_csv;
  CLI::App* analyze =
      app.add_subcommand("analyze", "run the two-phase association analysis");
  analyze->add_option("counts", an.counts_path, "count table CSV")->required();
  analyze->add_option("covariates", an.covariates_path, "covariate CSV")
      ->required();
  analyze->add_option("--config", an.config_path, "key = value config file");
  analyze->add_option("--x-cols", x_cols_csv,
                      "comma-separated tested covariate columns");
  analyze->add_option("--w-cols", w_cols_csv,
                      "comma-separated adjustment covariate columns");
  analyze->add_option("--out", an.out_dir, "output directory")->required();
  analyze->add_flag("--quiet", an.quiet, "suppress progress output");
  add_override_flags(analyze, an.overrides, an.threads);

  ifaa::cmd::BenchmarkOptions bm;
  std::vector<std::string> external_specs;
  CLI::App* benchmark = app.add_subcommand(
      "benchmark", "run simulation scenarios against the baselines");
  benchmark->add_option("scenarios", bm.scenario_dir,
                        "directory of .scn scenario files")
      ->required();
  benchmark->add_option("--config", bm.config_path, "key = value config file");
  benchmark->add_option("--replicates", bm.replicates,
                        "replicate datasets per scenario");
  benchmark->add_option("--external", external_specs,
                        "NAME=DIR with per-scenario selection CSVs")
      ->take_all();
  benchmark->add_option("--out", bm.out_dir, "output directory")->required();
  benchmark->add_flag("--quiet", bm.quiet, "suppress progress output");
  add_override_flags(benchmark, bm.overrides, bm.threads);

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return ifaa::cmd::cmd_simulate(sim);

  if (analyze->parsed()) {
    an.x_cols = split_list(x_cols_csv);
    an.w_cols = split_list(w_cols_csv);
    return ifaa::cmd::cmd_analyze(an);
  }

  for (const auto& spec : external_specs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
      std::fprintf(stderr, "ifaa: error: --external expects NAME=DIR, got '%s'\n",
                   spec.c_str());
      return ifaa::cmd::kExitError;
    }
    bm.externals.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
  }
  return ifaa::cmd::cmd_benchmark(bm);
}
