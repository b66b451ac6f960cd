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

#ifndef IFAA_PHASE1_HPP
#define IFAA_PHASE1_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ifaa/data_model.hpp"

namespace ifaa {

// Log-ratio responses against one reference taxon. For each taxon k the
// response log(Y_k / Y_ref) is defined on the samples where both counts are
// positive; taxa with fewer than min_overlap such samples are unusable for
// this reference.
struct RatioDataset {
  std::string ref_taxon;
  int ref_index = -1;
  std::vector<std::vector<int>> sample_idx;   // per taxon, overlap samples
  std::vector<std::vector<double>> response;  // per taxon, log ratios
  std::vector<int> overlap;                   // per taxon
  std::vector<char> usable;                   // overlap >= min_overlap, k != ref
};

RatioDataset build_logratio_regression(const ValidatedDataset& dataset,
                                       const std::string& ref_taxon,
                                       const AnalysisConfig& config);

// One reference pass: Z_r[k] = 1 iff the MCP fit of taxon k's ratio
// regression selects any X coefficient. The reference itself and unusable
// taxa score 0.
std::vector<std::uint8_t> selection_pass(const ValidatedDataset& dataset,
                                         const std::string& ref_taxon,
                                         const AnalysisConfig& config);

struct AccumulatedCounts {
  std::vector<int> z;             // selection count per taxon
  std::vector<double> coef_sum;   // summed fitted X coefficients, for signs
};

AccumulatedCounts accumulate_counts(const ValidatedDataset& dataset,
                                    const std::vector<std::string>& reference_set,
                                    const AnalysisConfig& config,
                                    unsigned threads = 1);

struct ExpectedCounts {
  double k_a = 0.0;        // expected count for an associated taxon
  double k_b = 0.0;        // expected count for an independent taxon
  double mean_diff = 0.0;  // k_a - k_b
};

// Closed-form expectations for R reference passes over K+1 taxa when m_a
// taxa are associated:  k_a = K*R/(K+1),  k_b = R*m_a/(K+1),
// mean_diff = (m_b - 1)*R/(K+1). Requires at least two independent taxa.
ExpectedCounts expected_counts(int k, int r, int m_a);

struct PermutationOutcome {
  std::vector<int> perm_maxima;  // C_p^m per permutation
  int threshold = 0;             // C^alpha, nearest-rank percentile
};

// Permutes the rows of X only (counts and W stay fixed), recomputes the
// selection counts with the same reference set, and takes the
// ceil((1-alpha)*P)-th order statistic of the per-permutation maxima.
PermutationOutcome permutation_threshold(const ValidatedDataset& dataset,
                                         const std::vector<std::string>& reference_set,
                                         const AnalysisConfig& config,
                                         std::uint64_t seed,
                                         unsigned threads = 1);

struct SetSplit {
  std::vector<int> set_a;  // taxon indices with z >= threshold
  std::vector<int> set_b;  // usable complement
};

// Throws EmptySetBError when no usable taxon falls below the threshold.
SetSplit identify_sets(const std::vector<int>& z, int threshold,
                       const std::vector<char>& usable);

struct PhaseOneResult {
  std::vector<std::string> taxon_ids;  // dataset order, aligns the vectors
  std::vector<std::string> reference_set;
  std::vector<int> z_counts;
  std::vector<int> perm_maxima;
  int threshold = 0;
  std::vector<std::string> set_a;
  std::vector<std::string> set_b;
  std::vector<std::string> unusable;   // unusable against every reference
  std::vector<double> mean_x_coef;     // average fitted X coefficient
};

// Full Phase 1: reference sampling from the master seed, R selection passes,
// P permutations, threshold and set split. An empty set B is reported in the
// result (set_b empty) rather than thrown, so callers can decide how to
// continue.
PhaseOneResult run_phase1(const ValidatedDataset& dataset,
                          const AnalysisConfig& config, unsigned threads = 1);

// Heatmap-ready table: one row per taxon with z_count >= floor, one column
// per sample; cell = sign(mean X coefficient) * z_count, 0 where the taxon
// is absent in that sample.
void write_heatmap_csv(const ValidatedDataset& dataset,
                       const PhaseOneResult& result, const std::string& path,
                       int floor = 1);

}  // namespace ifaa

#endif  // IFAA_PHASE1_HPP
