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

#include "ifaa/metrics.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

#include "ifaa/csv.hpp"
#include "ifaa/error.hpp"
#include "ifaa/parallel.hpp"
#include "ifaa/phase1.hpp"
#include "ifaa/rng.hpp"

namespace ifaa {

namespace {

constexpr double kBhLevel = 0.2;  // targeted FDR for the baseline methods

std::vector<double> midranks(const std::vector<double>& pooled_sorted) {
  const std::size_t n = pooled_sorted.size();
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled_sorted[j + 1] == pooled_sorted[i]) ++j;
    const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t) rank[t] = r;
    i = j + 1;
  }
  return rank;
}

double exact_two_sided_p(const std::vector<double>& ranks, std::size_t na,
                         double w_obs) {
  const std::size_t n = ranks.size();
  // Iterate over all C(n, na) index subsets.
  std::vector<std::size_t> pick(na);
  for (std::size_t i = 0; i < na; ++i) pick[i] = i;
  long long total = 0, le = 0, ge = 0;
  const double eps = 1e-9;
  for (;;) {
    double w = 0.0;
    for (std::size_t i : pick) w += ranks[i];
    ++total;
    if (w <= w_obs + eps) ++le;
    if (w >= w_obs - eps) ++ge;

    // next combination
    std::size_t i = na;
    while (i > 0) {
      --i;
      if (pick[i] != i + n - na) {
        ++pick[i];
        for (std::size_t j = i + 1; j < na; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return std::min(
          1.0, 2.0 * std::min(static_cast<double>(le) / total,
                              static_cast<double>(ge) / total));
    }
  }
}

}  // namespace

Confusion confusion(const std::set<std::string>& selected,
                    const std::set<std::string>& truth,
                    const std::vector<std::string>& all) {
  std::set<std::string> universe(all.begin(), all.end());
  for (const auto& s : selected)
    if (!universe.count(s))
      throw ValidationError("confusion: selected id '" + s +
                            "' not in the evaluated set");
  for (const auto& t : truth)
    if (!universe.count(t))
      throw ValidationError("confusion: truth id '" + t +
                            "' not in the evaluated set");
  Confusion c;
  for (const auto& id : universe) {
    const bool sel = selected.count(id) != 0;
    const bool pos = truth.count(id) != 0;
    if (sel && pos)
      ++c.tp;
    else if (sel)
      ++c.fp;
    else if (pos)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

PerfMetrics performance_metrics(const Confusion& c) {
  PerfMetrics m;
  if (c.tp + c.fn > 0)
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.tp + c.fp > 0)
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (m.recall && m.precision && (*m.recall > 0.0 || *m.precision > 0.0))
    m.f1 = 2.0 * *m.recall * *m.precision / (*m.recall + *m.precision);
  if (c.fp + c.tn > 0)
    m.type1 = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  return m;
}

double wilcoxon_rank_sum(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw ValidationError("wilcoxon_rank_sum: empty sample");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = pooled[order[i]];
  std::vector<double> rank_sorted = midranks(sorted);
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = rank_sorted[i];

  double w = 0.0;
  for (std::size_t i = 0; i < na; ++i) w += rank[i];

  if (n <= 12) return exact_two_sided_p(rank_sorted, na, w);

  // Normal approximation with tie and continuity corrections.
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double mu = na * (n + 1) / 2.0;
  const double var =
      static_cast<double>(na) * nb / 12.0 *
      ((n + 1) - tie_term / (static_cast<double>(n) * (n - 1)));
  if (var <= 0.0) return 1.0;  // all pooled values tied
  double z = (std::fabs(w - mu) - 0.5) / std::sqrt(var);
  if (z < 0.0) z = 0.0;
  return std::erfc(z / std::sqrt(2.0));
}

std::vector<std::size_t> bh_adjust(const std::vector<double>& p_values,
                                   double q) {
  if (q < 0.0) throw ValidationError("bh_adjust: negative q");
  const std::size_t m = p_values.size();
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("bh_adjust: p-value outside [0,1]");

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (p_values[x] != p_values[y]) return p_values[x] < p_values[y];
    return x < y;
  });

  std::size_t cut = 0;  // number of sorted entries selected
  for (std::size_t i = m; i >= 1; --i) {
    if (p_values[order[i - 1]] <= q * static_cast<double>(i) / m) {
      cut = i;
      break;
    }
  }
  std::vector<std::size_t> selected(order.begin(), order.begin() + cut);
  std::sort(selected.begin(), selected.end());
  return selected;
}

const char* method_name(BuiltinMethod m) {
  switch (m) {
    case BuiltinMethod::ifaa:
      return "ifaa";
    case BuiltinMethod::wilcoxon_aa:
      return "wilcoxon_aa";
    case BuiltinMethod::wilcoxon_ra:
      return "wilcoxon_ra";
  }
  return "?";
}

std::map<int, std::set<std::string>> load_external_selections(
    const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.header.size() != 3 || t.header[0] != "replicate" ||
      t.header[1] != "taxon_id" || t.header[2] != "selected")
    throw ParseError(path + ": expected header replicate,taxon_id,selected");
  std::map<int, std::set<std::string>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = path + ": line " + std::to_string(r + 2);
    const long long rep = parse_int_cell(row[0], ctx);
    const long long sel = parse_int_cell(row[2], ctx);
    if (sel != 0 && sel != 1)
      throw ParseError(ctx + ": selected must be 0 or 1");
    auto& s = out[static_cast<int>(rep)];
    if (sel == 1) s.insert(row[1]);
  }
  return out;
}

namespace {

std::set<std::string> wilcoxon_select(const SimulatedStudy& study,
                                      bool relative) {
  const CountMatrix& counts = study.observed_counts;
  const std::size_t n = counts.n_samples();
  const std::size_t k1 = counts.n_taxa();

  std::vector<double> totals(n, 0.0);
  if (relative)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k1; ++j) totals[i] += counts.counts(i, j);

  std::vector<double> p(k1, 1.0);
  for (std::size_t j = 0; j < k1; ++j) {
    std::vector<double> g0, g1;
    for (std::size_t i = 0; i < n; ++i) {
      double v = counts.counts(i, j);
      if (relative) v = totals[i] > 0.0 ? v / totals[i] : 0.0;
      (study.covariates.x(i, 0) == 0.0 ? g0 : g1).push_back(v);
    }
    if (g0.empty() || g1.empty())
      throw ValidationError("wilcoxon baseline: a group is empty");
    p[j] = wilcoxon_rank_sum(g0, g1);
  }

  std::set<std::string> selected;
  for (std::size_t j : bh_adjust(p, kBhLevel))
    selected.insert(counts.taxon_ids[j]);
  return selected;
}

std::set<std::string> ifaa_select(const SimulatedStudy& study,
                                  const AnalysisConfig& config,
                                  std::uint64_t replicate_seed) {
  AnalysisConfig rep_config = config;
  rep_config.master_seed = replicate_seed;
  ValidatedDataset vd =
      validate_dataset(study.observed_counts, study.covariates, rep_config);
  PhaseOneResult ph1 = run_phase1(vd, rep_config, 1);
  return {ph1.set_a.begin(), ph1.set_a.end()};
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<NamedScenario>& scenarios,
                              const std::vector<BuiltinMethod>& methods,
                              const std::vector<ExternalMethod>& externals,
                              int n_replicates, const AnalysisConfig& config,
                              std::uint64_t seed, unsigned threads) {
  if (scenarios.empty()) throw ValidationError("run_benchmark: no scenarios");
  if (n_replicates < 1)
    throw ValidationError("run_benchmark: n_replicates must be >= 1");
  validate_config(config);

  std::vector<std::string> method_names;
  for (BuiltinMethod m : methods) method_names.push_back(method_name(m));
  for (const auto& e : externals) method_names.push_back(e.name);
  const std::size_t n_methods = method_names.size();
  const char* metric_names[4] = {"recall", "precision", "f1", "type1"};

  BenchmarkReport report;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& ns = scenarios[s];
    validate_scenario(ns.scenario);

    // per method x replicate x metric
    std::vector<std::vector<std::array<std::optional<double>, 4>>> results(
        n_methods,
        std::vector<std::array<std::optional<double>, 4>>(n_replicates));
    std::vector<std::vector<double>> walls(
        n_methods, std::vector<double>(n_replicates, 0.0));
    std::vector<std::vector<std::string>> fails(n_replicates);

    parallel_for(static_cast<std::size_t>(n_replicates), threads,
                 [&](std::size_t rep) {
      const std::uint64_t rep_seed = mix_seed(
          seed, {kStreamReplicate, static_cast<std::uint64_t>(s),
                 static_cast<std::uint64_t>(rep)});
      SimulatedStudy study = generate_benchmark(ns.scenario, rep_seed);

      std::set<std::string> truth;
      for (std::size_t j = 0; j < study.is_differential.size(); ++j)
        if (study.is_differential[j])
          truth.insert(study.observed_counts.taxon_ids[j]);

      for (std::size_t m = 0; m < n_methods; ++m) {
        const auto start = std::chrono::steady_clock::now();
        try {
          std::set<std::string> selected;
          if (m < methods.size()) {
            switch (methods[m]) {
              case BuiltinMethod::ifaa:
                selected = ifaa_select(study, config,
                                       mix_seed(rep_seed, {kStreamRefs}));
                break;
              case BuiltinMethod::wilcoxon_aa:
                selected = wilcoxon_select(study, false);
                break;
              case BuiltinMethod::wilcoxon_ra:
                selected = wilcoxon_select(study, true);
                break;
            }
          } else {
            const auto& ext = externals[m - methods.size()];
            auto sit = ext.selections.find(ns.name);
            if (sit == ext.selections.end())
              throw Error("no external results for scenario '" + ns.name + "'");
            auto rit = sit->second.find(static_cast<int>(rep));
            if (rit == sit->second.end())
              throw Error("no external results for replicate " +
                          std::to_string(rep));
            selected = rit->second;
          }
          PerfMetrics pm = performance_metrics(
              confusion(selected, truth, study.observed_counts.taxon_ids));
          results[m][rep] = {pm.recall, pm.precision, pm.f1, pm.type1};
        } catch (const std::exception& e) {
          fails[rep].push_back(ns.name + "/" + method_names[m] +
                               "/replicate " + std::to_string(rep) + ": " +
                               e.what());
        }
        walls[m][rep] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
      }
    });

    for (const auto& f : fails)
      report.failures.insert(report.failures.end(), f.begin(), f.end());

    for (std::size_t m = 0; m < n_methods; ++m) {
      double wall = 0.0;
      for (double wv : walls[m]) wall += wv;
      report.wall_seconds[ns.name + "/" + method_names[m]] = wall;

      for (int metric = 0; metric < 4; ++metric) {
        BenchmarkCell cell;
        cell.scenario = ns.name;
        cell.method = method_names[m];
        cell.metric = metric_names[metric];
        cell.n_replicates = n_replicates;
        std::vector<double> vals;
        for (int rep = 0; rep < n_replicates; ++rep)
          if (results[m][rep][metric]) vals.push_back(*results[m][rep][metric]);
        cell.n_defined = static_cast<int>(vals.size());
        if (!vals.empty()) {
          double mean = 0.0;
          for (double v : vals) mean += v;
          mean /= vals.size();
          cell.mean = mean;
          if (vals.size() > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            cell.stderr_mean =
                std::sqrt(ss / (vals.size() - 1) / vals.size());
          }
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

void write_benchmark_csv(const BenchmarkReport& report,
                         const std::string& path) {
  std::string out = "scenario,method,metric,mean,stderr,n_defined,n_replicates\n";
  for (const auto& c : report.cells) {
    out += c.scenario + "," + c.method + "," + c.metric + ",";
    out += c.n_defined > 0 ? format_double(c.mean) : std::string("NA");
    out += ",";
    out += c.n_defined > 0 ? format_double(c.stderr_mean) : std::string("NA");
    out += "," + std::to_string(c.n_defined) + "," +
           std::to_string(c.n_replicates) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace ifaa
