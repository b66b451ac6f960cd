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

#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "ifaa/commands.hpp"
#include "ifaa/csv.hpp"
#include "testutil.hpp"

using namespace ifaa;
using ifaa::cmd::kExitError;
using ifaa::cmd::kExitOk;

namespace {

const char* kTinyScenario =
    "n_subjects = 40\n"
    "n_taxa = 10\n"
    "frac_differential = 0.3\n"
    "gamma_shapes = 300, 1000, 5000\n"
    "diff_range_low = 600, 900\n"
    "diff_range_med = 1200, 2400\n"
    "diff_range_high = 6000, 9000\n"
    "c1 = 0.5\n"
    "c2 = 0.5\n"
    "seed = 42\n";

int run_simulate(const std::string& scn, const std::string& out) {
  cmd::SimulateOptions opts;
  opts.scenario_file = scn;
  opts.out_dir = out;
  opts.quiet = true;
  return cmd::cmd_simulate(opts);
}

}  // namespace

TEST_CASE("simulate writes aligned CSVs and is seed-deterministic") {
  test::TempDir dir("sim_cmd");
  test::write_file(dir.file("tiny.scn"), kTinyScenario);

  REQUIRE(run_simulate(dir.file("tiny.scn"), dir.path() + "/out1") == kExitOk);
  REQUIRE(run_simulate(dir.file("tiny.scn"), dir.path() + "/out2") == kExitOk);

  for (const char* name : {"counts.csv", "covariates.csv", "truth.csv"}) {
    const std::string a = test::read_file(dir.path() + "/out1/" + name);
    const std::string b = test::read_file(dir.path() + "/out2/" + name);
    CHECK(a == b);
    CHECK(!a.empty());
  }
  CsvTable counts = read_csv(dir.path() + "/out1/counts.csv");
  CsvTable covars = read_csv(dir.path() + "/out1/covariates.csv");
  CsvTable truth = read_csv(dir.path() + "/out1/truth.csv");
  CHECK(counts.rows.size() == 40);
  CHECK(covars.rows.size() == 40);
  CHECK(truth.rows.size() == 10);
  for (std::size_t i = 0; i < counts.rows.size(); ++i)
    CHECK(counts.rows[i][0] == covars.rows[i][0]);
}

TEST_CASE("simulate rejects invalid scenarios naming the field") {
  test::TempDir dir("sim_bad");
  test::write_file(dir.file("bad.scn"), "n_taxa = 6\nc1 = 0\n");
  CHECK(run_simulate(dir.file("bad.scn"), dir.path() + "/o") == kExitError);
}

TEST_CASE("analyze runs end to end with config precedence") {
  test::TempDir dir("an_cmd");
  test::write_file(dir.file("tiny.scn"), kTinyScenario);
  REQUIRE(run_simulate(dir.file("tiny.scn"), dir.path() + "/data") == kExitOk);
  test::write_file(dir.file("cfg"),
                   "alpha = 0.3\n"
                   "r_refs = 3\n"
                   "n_perms = 6\n"
                   "bootstrap_reps = 40\n"
                   "min_overlap = 4\n"
                   "master_seed = 7\n"
                   "x_cols = group\n");

  cmd::AnalyzeOptions opts;
  opts.counts_path = dir.path() + "/data/counts.csv";
  opts.covariates_path = dir.path() + "/data/covariates.csv";
  opts.config_path = dir.file("cfg");
  opts.out_dir = dir.path() + "/run";
  opts.overrides.alpha = 0.25;  // flag beats config file
  opts.threads = 2;
  opts.quiet = true;
  REQUIRE(cmd::cmd_analyze(opts) == kExitOk);

  for (const char* name :
       {"phase1.json", "estimates.csv", "estimates.json", "heatmap.csv",
        "manifest.json"})
    CHECK(std::filesystem::exists(dir.path() + "/run/" + std::string(name)));

  nlohmann::json manifest =
      nlohmann::json::parse(test::read_file(dir.path() + "/run/manifest.json"));
  CHECK(manifest["config"]["alpha"] == "0.25");
  CHECK(manifest["config"]["r_refs"] == "3");
  CHECK(manifest["config"]["x_cols"] == "group");
  CHECK(manifest["master_seed"] == 7);

  nlohmann::json phase1 =
      nlohmann::json::parse(test::read_file(dir.path() + "/run/phase1.json"));
  CHECK(phase1["z_counts"].size() == phase1["taxon_ids"].size());
  CHECK(phase1["perm_maxima"].size() == 6);
}

TEST_CASE("analyze reruns are byte-identical except the manifest") {
  test::TempDir dir("an_det");
  test::write_file(dir.file("tiny.scn"), kTinyScenario);
  REQUIRE(run_simulate(dir.file("tiny.scn"), dir.path() + "/data") == kExitOk);

  auto run = [&](const std::string& out, unsigned threads) {
    cmd::AnalyzeOptions opts;
    opts.counts_path = dir.path() + "/data/counts.csv";
    opts.covariates_path = dir.path() + "/data/covariates.csv";
    opts.out_dir = out;
    opts.x_cols = {"group"};
    opts.overrides.refs = 3;
    opts.overrides.perms = 5;
    opts.overrides.bootstrap = 30;
    opts.overrides.min_overlap = 4;
    opts.overrides.seed = 11;
    opts.threads = threads;
    opts.quiet = true;
    return cmd::cmd_analyze(opts);
  };
  // Either the regular path or the empty-set-B fallback is acceptable here;
  // both must be reproducible byte for byte.
  const int code1 = run(dir.path() + "/r1", 1);
  const int code2 = run(dir.path() + "/r2", 4);
  REQUIRE((code1 == kExitOk || code1 == cmd::kExitFallback));
  CHECK(code1 == code2);
  for (const char* name :
       {"phase1.json", "estimates.csv", "estimates.json", "heatmap.csv"}) {
    CHECK(test::read_file(dir.path() + "/r1/" + name) ==
          test::read_file(dir.path() + "/r2/" + name));
  }
}

TEST_CASE("empty set B falls back to the least-selected reference, exit 2") {
  test::TempDir dir("an_fb");
  test::write_file(dir.file("tiny.scn"), kTinyScenario);
  REQUIRE(run_simulate(dir.file("tiny.scn"), dir.path() + "/data") == kExitOk);

  // Settings chosen so the permutation threshold collapses to zero: every
  // usable taxon lands in set A and no independent reference exists.
  cmd::AnalyzeOptions opts;
  opts.counts_path = dir.path() + "/data/counts.csv";
  opts.covariates_path = dir.path() + "/data/covariates.csv";
  opts.out_dir = dir.path() + "/run";
  opts.x_cols = {"group"};
  opts.overrides.refs = 3;
  opts.overrides.perms = 5;
  opts.overrides.bootstrap = 30;
  opts.overrides.min_overlap = 4;
  opts.overrides.seed = 11;
  opts.threads = 2;
  opts.quiet = true;
  REQUIRE(cmd::cmd_analyze(opts) == cmd::kExitFallback);

  // Estimates still produced, and the manifest records the fallback.
  CsvTable est = read_csv(dir.path() + "/run/estimates.csv");
  CHECK(!est.rows.empty());
  const std::string manifest = test::read_file(dir.path() + "/run/manifest.json");
  CHECK(manifest.find("set B empty") != std::string::npos);
}

TEST_CASE("analyze errors name the missing input") {
  cmd::AnalyzeOptions opts;
  opts.counts_path = "/nonexistent/counts.csv";
  opts.covariates_path = "/nonexistent/cov.csv";
  opts.out_dir = "/tmp/ifaa_nonexistent_out";
  opts.x_cols = {"group"};
  opts.quiet = true;
  CHECK(cmd::cmd_analyze(opts) == kExitError);

  // Missing tested covariates is a configuration error.
  test::TempDir dir("an_nox");
  test::write_file(dir.file("tiny.scn"), kTinyScenario);
  REQUIRE(run_simulate(dir.file("tiny.scn"), dir.path() + "/data") == kExitOk);
  cmd::AnalyzeOptions nox;
  nox.counts_path = dir.path() + "/data/counts.csv";
  nox.covariates_path = dir.path() + "/data/covariates.csv";
  nox.out_dir = dir.path() + "/out";
  nox.quiet = true;
  CHECK(cmd::cmd_analyze(nox) == kExitError);
}

TEST_CASE("benchmark command writes the report with expected shape") {
  test::TempDir dir("bm_cmd");
  std::filesystem::create_directories(dir.path() + "/scn");
  test::write_file(dir.path() + "/scn/tiny.scn", kTinyScenario);

  cmd::BenchmarkOptions opts;
  opts.scenario_dir = dir.path() + "/scn";
  opts.out_dir = dir.path() + "/out";
  opts.replicates = 2;
  opts.overrides.refs = 3;
  opts.overrides.perms = 5;
  opts.overrides.min_overlap = 4;
  opts.overrides.seed = 5;
  opts.threads = 2;
  opts.quiet = true;
  REQUIRE(cmd::cmd_benchmark(opts) == kExitOk);

  CsvTable report = read_csv(dir.path() + "/out/report.csv");
  CHECK(report.header ==
        std::vector<std::string>{"scenario", "method", "metric", "mean",
                                 "stderr", "n_defined", "n_replicates"});
  CHECK(report.rows.size() == 1 * 3 * 4);  // scenarios x methods x metrics

  // Rerun into a second directory: report must be byte-identical.
  opts.out_dir = dir.path() + "/out2";
  REQUIRE(cmd::cmd_benchmark(opts) == kExitOk);
  CHECK(test::read_file(dir.path() + "/out/report.csv") ==
        test::read_file(dir.path() + "/out2/report.csv"));
}

TEST_CASE("benchmark with an empty scenario directory fails") {
  test::TempDir dir("bm_empty");
  std::filesystem::create_directories(dir.path() + "/scn");
  cmd::BenchmarkOptions opts;
  opts.scenario_dir = dir.path() + "/scn";
  opts.out_dir = dir.path() + "/out";
  opts.quiet = true;
  CHECK(cmd::cmd_benchmark(opts) == kExitError);
}
