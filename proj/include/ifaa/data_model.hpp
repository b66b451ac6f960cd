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

#ifndef IFAA_DATA_MODEL_HPP
#define IFAA_DATA_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ifaa/matrix.hpp"

namespace ifaa {

// Observed (or simulated true) abundance counts, samples x taxa. Values are
// nonnegative reals; observed data is integer-valued but the pipeline only
// assumes nonnegativity so that real-valued oracle data can flow through the
// same types.
struct CountMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::string> taxon_ids;
  Matrix counts;  // sample_ids.size() x taxon_ids.size()

  std::size_t n_samples() const { return sample_ids.size(); }
  std::size_t n_taxa() const { return taxon_ids.size(); }
};

// Per-sample covariates split into tested columns X and adjustment columns W.
struct CovariateTable {
  std::vector<std::string> sample_ids;
  Matrix x;  // n x Q, the covariates whose associations are examined
  Matrix w;  // n x S, adjusted-for covariates; may have zero columns
  std::vector<std::string> x_names;
  std::vector<std::string> w_names;

  std::size_t n_samples() const { return sample_ids.size(); }
  std::size_t q() const { return x_names.size(); }
  std::size_t s() const { return w_names.size(); }
};

struct DropRecord {
  std::string id;
  std::string reason;
};

// Counts and covariates with identical sample order, after the row/column
// screens. Immutable once built; safe to share across threads.
struct ValidatedDataset {
  CountMatrix counts;
  CovariateTable covariates;
  std::vector<DropRecord> dropped_samples;
  std::vector<DropRecord> dropped_taxa;
};

// Tuning knobs for the two-phase analysis. Defaults follow the package-level
// conventions documented in the README; everything is overridable from the
// config file and CLI flags.
struct AnalysisConfig {
  double alpha = 0.25;        // family-wise error rate for taxa selection
  int r_refs = 40;            // number of randomly cycled reference taxa
  int n_perms = 40;           // permutation count for the selection threshold
  double mcp_gamma = 3.0;     // MCP concavity
  int lambda_grid_size = 50;  // penalty path resolution
  int bootstrap_reps = 500;   // bootstrap resamples for the final CIs
  double ci_level = 0.95;
  int min_overlap = 0;        // 0 = auto: max(Q+S+2, 10)
  std::uint64_t master_seed = 1;
};

// Throws ValidationError on out-of-range values. n_taxa of 0 skips the
// r_refs upper-bound check (used before a dataset is loaded).
void validate_config(const AnalysisConfig& config, std::size_t n_taxa = 0);

int effective_min_overlap(const AnalysisConfig& config, std::size_t q,
                          std::size_t s);

// CSV ingestion. Count files: header "sample_id,<taxon ids...>", one row per
// sample, nonnegative numeric cells. Covariate files: same shape with
// covariate names in the header.
CountMatrix load_count_table(const std::string& path);
void write_count_table(const CountMatrix& m, const std::string& path);

CovariateTable load_covariates(const std::string& path,
                               const std::vector<std::string>& x_names,
                               const std::vector<std::string>& w_names);

// Aligns counts and covariates by sample id (count-file order), drops samples
// with fewer than two nonzero taxa and taxa with no nonzero sample, and
// records every drop. Throws on empty id intersection or constant X columns.
ValidatedDataset validate_dataset(const CountMatrix& counts,
                                  const CovariateTable& covariates,
                                  const AnalysisConfig& config);

}  // namespace ifaa

#endif  // IFAA_DATA_MODEL_HPP
