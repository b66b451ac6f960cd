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

#ifndef IFAA_METRICS_HPP
#define IFAA_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ifaa/data_model.hpp"
#include "ifaa/ziln_sim.hpp"

namespace ifaa {

struct Confusion {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(const std::set<std::string>& selected,
                    const std::set<std::string>& truth,
                    const std::vector<std::string>& all);

// Recall, precision, F1 and type-I error; an index with a zero denominator
// is reported as nullopt and excluded from scenario means.
struct PerfMetrics {
  std::optional<double> recall, precision, f1, type1;
};

PerfMetrics performance_metrics(const Confusion& c);

// Two-sided rank-sum p-value: exact enumeration over all group assignments
// when |a|+|b| <= 12, otherwise the normal approximation with midranks, tie
// correction and continuity correction.
double wilcoxon_rank_sum(const std::vector<double>& a,
                         const std::vector<double>& b);

// Benjamini-Hochberg step-up at level q; returns selected original indices,
// ascending.
std::vector<std::size_t> bh_adjust(const std::vector<double>& p_values,
                                   double q);

// ---------------------------------------------------------------------------
// Benchmark harness

enum class BuiltinMethod { ifaa, wilcoxon_aa, wilcoxon_ra };

const char* method_name(BuiltinMethod m);

// Externally computed selections imported for side-by-side scoring:
// scenario name -> replicate -> selected taxa.
struct ExternalMethod {
  std::string name;
  std::map<std::string, std::map<int, std::set<std::string>>> selections;
};

// CSV with header replicate,taxon_id,selected (0/1).
std::map<int, std::set<std::string>> load_external_selections(
    const std::string& path);

struct NamedScenario {
  std::string name;
  SimScenario scenario;
};

struct BenchmarkCell {
  std::string scenario;
  std::string method;
  std::string metric;  // recall | precision | f1 | type1
  double mean = 0.0;
  double stderr_mean = 0.0;
  int n_defined = 0;
  int n_replicates = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkCell> cells;
  std::map<std::string, double> wall_seconds;  // "scenario/method"
  std::vector<std::string> failures;           // per-replicate method errors
};

// Per replicate: generate a study, run each method, score the selected taxa
// against the simulation truth. Replicates run in parallel on derived seeds;
// a failing method is recorded and the replicate is kept for the others.
BenchmarkReport run_benchmark(const std::vector<NamedScenario>& scenarios,
                              const std::vector<BuiltinMethod>& methods,
                              const std::vector<ExternalMethod>& externals,
                              int n_replicates, const AnalysisConfig& config,
                              std::uint64_t seed, unsigned threads = 1);

void write_benchmark_csv(const BenchmarkReport& report,
                         const std::string& path);

}  // namespace ifaa

#endif  // IFAA_METRICS_HPP
