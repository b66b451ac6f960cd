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

#include "ifaa/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <type_traits>

#include <json.hpp>

#include "ifaa/csv.hpp"
#include "ifaa/data_model.hpp"
#include "ifaa/error.hpp"
#include "ifaa/kv_config.hpp"
#include "ifaa/manifest.hpp"
#include "ifaa/metrics.hpp"
#include "ifaa/parallel.hpp"
#include "ifaa/phase1.hpp"
#include "ifaa/phase2.hpp"
#include "ifaa/version.hpp"
#include "ifaa/ziln_sim.hpp"

namespace fs = std::filesystem;

namespace ifaa::cmd {

namespace {

class StageTimer {
 public:
  explicit StageTimer(RunManifest& manifest, bool quiet)
      : manifest_(manifest), quiet_(quiet) {}

  template <class Fn>
  auto run(const std::string& stage, Fn&& fn) {
    if (!quiet_) std::cerr << "ifaa: " << stage << "...\n";
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      manifest_.timings_seconds[stage] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
    };
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto out = fn();
      finish();
      return out;
    }
  }

 private:
  RunManifest& manifest_;
  bool quiet_;
};

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw Error("cannot create output directory: " + out_dir);
}

AnalysisConfig load_config(const std::string& config_path,
                           const ConfigOverrides& ov,
                           std::vector<std::string>* x_cols,
                           std::vector<std::string>* w_cols) {
  AnalysisConfig c;
  if (!config_path.empty()) {
    KvConfig kv = KvConfig::parse_file(config_path);
    c.alpha = kv.get_double("alpha", c.alpha);
    c.r_refs = static_cast<int>(kv.get_int("r_refs", c.r_refs));
    c.n_perms = static_cast<int>(kv.get_int("n_perms", c.n_perms));
    c.mcp_gamma = kv.get_double("mcp_gamma", c.mcp_gamma);
    c.lambda_grid_size =
        static_cast<int>(kv.get_int("lambda_grid_size", c.lambda_grid_size));
    c.bootstrap_reps =
        static_cast<int>(kv.get_int("bootstrap_reps", c.bootstrap_reps));
    c.ci_level = kv.get_double("ci_level", c.ci_level);
    c.min_overlap = static_cast<int>(kv.get_int("min_overlap", c.min_overlap));
    c.master_seed = kv.get_uint64("master_seed", c.master_seed);
    if (x_cols && x_cols->empty() && kv.has("x_cols"))
      *x_cols = kv.get_string_list("x_cols");
    if (w_cols && w_cols->empty() && kv.has("w_cols"))
      *w_cols = kv.get_string_list("w_cols");
  }
  if (ov.alpha) c.alpha = *ov.alpha;
  if (ov.refs) c.r_refs = *ov.refs;
  if (ov.perms) c.n_perms = *ov.perms;
  if (ov.bootstrap) c.bootstrap_reps = *ov.bootstrap;
  if (ov.ci_level) c.ci_level = *ov.ci_level;
  if (ov.min_overlap) c.min_overlap = *ov.min_overlap;
  if (ov.seed) c.master_seed = *ov.seed;
  return c;
}

void write_truth_csv(const SimulatedStudy& study, const std::string& path) {
  std::string out = "taxon_id,is_differential,true_effect\n";
  for (std::size_t j = 0; j < study.observed_counts.n_taxa(); ++j) {
    out += study.observed_counts.taxon_ids[j];
    out += study.is_differential[j] ? ",1," : ",0,";
    out += format_double(study.true_effect[j]) + "\n";
  }
  write_text_file(path, out);
}

void write_covariates_csv(const CovariateTable& cov, const std::string& path) {
  std::string out = "sample_id";
  for (const auto& n : cov.x_names) out += "," + n;
  for (const auto& n : cov.w_names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < cov.n_samples(); ++i) {
    out += cov.sample_ids[i];
    for (std::size_t c = 0; c < cov.q(); ++c)
      out += "," + format_double(cov.x(i, c));
    for (std::size_t c = 0; c < cov.s(); ++c)
      out += "," + format_double(cov.w(i, c));
    out += "\n";
  }
  write_text_file(path, out);
}

nlohmann::json estimates_to_json(const AssociationEstimates& est) {
  nlohmann::json j;
  j["reference_taxon"] = est.reference_taxon;
  j["ci_level"] = est.ci_level;
  j["rows"] = nlohmann::json::array();
  auto num = [](double v) {
    return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
  };
  for (const auto& row : est.rows) {
    nlohmann::json r;
    r["taxon_id"] = row.taxon_id;
    r["covariate"] = row.covariate;
    r["estimate"] = num(row.estimate);
    r["ci_lower"] = num(row.ci_lower);
    r["ci_upper"] = num(row.ci_upper);
    r["fold_change"] = num(row.fold_change);
    r["n_used"] = row.n_used;
    r["available"] = row.available;
    j["rows"].push_back(std::move(r));
  }
  return j;
}

nlohmann::json phase1_to_json(const PhaseOneResult& r) {
  nlohmann::json j;
  j["taxon_ids"] = r.taxon_ids;
  j["reference_set"] = r.reference_set;
  j["z_counts"] = r.z_counts;
  j["perm_maxima"] = r.perm_maxima;
  j["threshold"] = r.threshold;
  j["set_a"] = r.set_a;
  j["set_b"] = r.set_b;
  j["unusable"] = r.unusable;
  j["mean_x_coef"] = r.mean_x_coef;
  return j;
}

int report_error(const std::string& what) {
  std::cerr << "ifaa: error: " << what << "\n";
  return kExitError;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts) {
  try {
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.tool_version = kVersion;
    StageTimer timer(manifest, opts.quiet);

    SimScenario scenario = scenario_from_file(opts.scenario_file);
    manifest.input_hashes[opts.scenario_file] =
        file_hash_hex(opts.scenario_file);
    manifest.master_seed = scenario.seed;
    const KvConfig scenario_kv = KvConfig::parse_file(opts.scenario_file);
    for (const auto& [k, v] : scenario_kv.entries()) manifest.config[k] = v;

    ensure_out_dir(opts.out_dir);
    SimulatedStudy study = timer.run("generate", [&] {
      return generate_benchmark(scenario, scenario.seed);
    });

    const std::string counts = (fs::path(opts.out_dir) / "counts.csv").string();
    const std::string covars =
        (fs::path(opts.out_dir) / "covariates.csv").string();
    const std::string truth = (fs::path(opts.out_dir) / "truth.csv").string();
    write_count_table(study.observed_counts, counts);
    write_covariates_csv(study.covariates, covars);
    write_truth_csv(study, truth);
    manifest.outputs = {"counts.csv", "covariates.csv", "truth.csv",
                        "manifest.json"};
    write_manifest(manifest,
                   (fs::path(opts.out_dir) / "manifest.json").string());
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e.what());
  }
}

int cmd_analyze(const AnalyzeOptions& opts) {
  try {
    RunManifest manifest;
    manifest.command = "analyze";
    manifest.tool_version = kVersion;
    StageTimer timer(manifest, opts.quiet);

    std::vector<std::string> x_cols = opts.x_cols;
    std::vector<std::string> w_cols = opts.w_cols;
    AnalysisConfig config =
        load_config(opts.config_path, opts.overrides, &x_cols, &w_cols);
    if (x_cols.empty())
      throw ValidationError(
          "no tested covariates: pass --x-cols or set x_cols in the config "
          "file");
    validate_config(config);

    const unsigned threads = resolve_threads(opts.threads);
    manifest.master_seed = config.master_seed;
    manifest.config = config_snapshot(config);
    manifest.config["threads"] = std::to_string(threads);
    std::string joined_x, joined_w;
    for (const auto& s : x_cols) joined_x += (joined_x.empty() ? "" : ",") + s;
    for (const auto& s : w_cols) joined_w += (joined_w.empty() ? "" : ",") + s;
    manifest.config["x_cols"] = joined_x;
    manifest.config["w_cols"] = joined_w;
    manifest.input_hashes[opts.counts_path] = file_hash_hex(opts.counts_path);
    manifest.input_hashes[opts.covariates_path] =
        file_hash_hex(opts.covariates_path);
    if (!opts.config_path.empty())
      manifest.input_hashes[opts.config_path] = file_hash_hex(opts.config_path);

    ensure_out_dir(opts.out_dir);

    CountMatrix counts = load_count_table(opts.counts_path);
    CovariateTable covariates =
        load_covariates(opts.covariates_path, x_cols, w_cols);
    ValidatedDataset dataset = timer.run("validate", [&] {
      return validate_dataset(counts, covariates, config);
    });
    for (const auto& d : dataset.dropped_samples)
      manifest.notes.push_back("dropped sample " + d.id + ": " + d.reason);
    for (const auto& d : dataset.dropped_taxa)
      manifest.notes.push_back("dropped taxon " + d.id + ": " + d.reason);

    PhaseOneResult ph1 = timer.run(
        "phase1", [&] { return run_phase1(dataset, config, threads); });

    write_text_file((fs::path(opts.out_dir) / "phase1.json").string(),
                    phase1_to_json(ph1).dump(2) + "\n");
    write_heatmap_csv(dataset, ph1,
                      (fs::path(opts.out_dir) / "heatmap.csv").string());

    int exit_code = kExitOk;
    AssociationEstimates estimates;
    if (ph1.set_b.empty()) {
      // No independent reference exists; estimate against the least-selected
      // usable taxon and flag the run.
      exit_code = kExitFallback;
      std::string ref;
      int best_z = 0;
      for (std::size_t k = 0; k < ph1.taxon_ids.size(); ++k) {
        const auto& id = ph1.taxon_ids[k];
        if (std::find(ph1.unusable.begin(), ph1.unusable.end(), id) !=
            ph1.unusable.end())
          continue;
        if (ref.empty() || ph1.z_counts[k] < best_z) {
          ref = id;
          best_z = ph1.z_counts[k];
        }
      }
      if (ref.empty()) throw Error("no usable taxa for estimation");
      manifest.notes.push_back(
          "set B empty: estimates use fallback reference '" + ref +
          "' and should be interpreted with care");
      std::vector<std::string> taxa;
      for (const auto& id : ph1.set_a)
        if (id != ref) taxa.push_back(id);
      estimates = timer.run("phase2", [&] {
        return estimate_for_taxa(dataset, taxa, ref, config,
                                 config.master_seed, threads);
      });
    } else {
      ReferenceChoice choice =
          choose_reference(dataset, ph1, ReferenceCriteria{});
      for (const auto& n : choice.notes) manifest.notes.push_back(n);
      manifest.notes.push_back("final reference taxon: " + choice.taxon);
      estimates = timer.run("phase2", [&] {
        return estimate_associations(dataset, ph1, choice.taxon, config,
                                     config.master_seed, threads);
      });
    }
    write_estimates_csv(estimates,
                        (fs::path(opts.out_dir) / "estimates.csv").string());
    write_text_file((fs::path(opts.out_dir) / "estimates.json").string(),
                    estimates_to_json(estimates).dump(2) + "\n");

    manifest.outputs = {"phase1.json", "heatmap.csv", "estimates.csv",
                        "estimates.json", "manifest.json"};
    write_manifest(manifest,
                   (fs::path(opts.out_dir) / "manifest.json").string());
    if (!opts.quiet) {
      double total = 0.0;
      for (const auto& [k, v] : manifest.timings_seconds) total += v;
      std::cerr << "ifaa: analyze finished in " << total << " s ("
                << ph1.set_a.size() << " taxa in set A)\n";
    }
    return exit_code;
  } catch (const std::exception& e) {
    return report_error(e.what());
  }
}

int cmd_benchmark(const BenchmarkOptions& opts) {
  try {
    RunManifest manifest;
    manifest.command = "benchmark";
    manifest.tool_version = kVersion;
    StageTimer timer(manifest, opts.quiet);

    AnalysisConfig config =
        load_config(opts.config_path, opts.overrides, nullptr, nullptr);
    // Benchmark selection follows the simulation convention of a 20% target
    // FDR unless the config says otherwise.
    if (opts.config_path.empty() && !opts.overrides.alpha) config.alpha = 0.2;
    validate_config(config);

    std::vector<std::string> files;
    if (fs::is_directory(opts.scenario_dir)) {
      for (const auto& entry : fs::directory_iterator(opts.scenario_dir))
        if (entry.path().extension() == ".scn")
          files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw ValidationError("no .scn scenario files in '" + opts.scenario_dir +
                            "'");

    std::vector<NamedScenario> scenarios;
    for (const auto& f : files) {
      NamedScenario ns;
      ns.name = fs::path(f).stem().string();
      ns.scenario = scenario_from_file(f);
      manifest.input_hashes[f] = file_hash_hex(f);
      scenarios.push_back(std::move(ns));
    }
    if (!opts.config_path.empty())
      manifest.input_hashes[opts.config_path] = file_hash_hex(opts.config_path);

    std::vector<ExternalMethod> externals;
    for (const auto& [name, dir] : opts.externals) {
      ExternalMethod ext;
      ext.name = name;
      for (const auto& ns : scenarios) {
        const fs::path p = fs::path(dir) / (ns.name + ".csv");
        if (fs::exists(p)) {
          ext.selections[ns.name] = load_external_selections(p.string());
          manifest.input_hashes[p.string()] = file_hash_hex(p.string());
        }
      }
      externals.push_back(std::move(ext));
    }

    const unsigned threads = resolve_threads(opts.threads);
    manifest.master_seed = config.master_seed;
    manifest.config = config_snapshot(config);
    manifest.config["threads"] = std::to_string(threads);
    manifest.config["replicates"] = std::to_string(opts.replicates);

    ensure_out_dir(opts.out_dir);
    const std::vector<BuiltinMethod> methods = {BuiltinMethod::ifaa,
                                                BuiltinMethod::wilcoxon_aa,
                                                BuiltinMethod::wilcoxon_ra};
    BenchmarkReport report = timer.run("benchmark", [&] {
      return run_benchmark(scenarios, methods, externals, opts.replicates,
                           config, config.master_seed, threads);
    });

    write_benchmark_csv(report,
                        (fs::path(opts.out_dir) / "report.csv").string());
    for (const auto& [key, secs] : report.wall_seconds)
      manifest.timings_seconds[key] = secs;
    for (const auto& f : report.failures)
      manifest.notes.push_back("failure: " + f);
    manifest.outputs = {"report.csv", "manifest.json"};
    write_manifest(manifest,
                   (fs::path(opts.out_dir) / "manifest.json").string());
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e.what());
  }
}

}  // namespace ifaa::cmd
