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

#ifndef IFAA_PHASE2_HPP
#define IFAA_PHASE2_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ifaa/data_model.hpp"
#include "ifaa/phase1.hpp"

namespace ifaa {

// Screens for a good final reference taxon among set B.
struct ReferenceCriteria {
  double min_prevalence = 0.10;      // nonzero fraction among retained samples
  bool per_group_prevalence = true;  // apply per group when X is binary
  bool z_tertile_cut = true;         // z <= first tertile of set-A counts
  double min_variance = 1e-6;        // log-abundance variance among nonzeros
};

struct ReferenceChoice {
  std::string taxon;
  bool fallback = false;  // no candidate passed; best-available returned
  std::vector<std::string> notes;
};

// Among set-B taxa passing all enabled criteria, returns the one with the
// smallest selection count; ties break by higher prevalence, then
// lexicographic id. When nothing passes, falls back to the smallest-count
// set-B taxon with a warning note.
ReferenceChoice choose_reference(const ValidatedDataset& dataset,
                                 const PhaseOneResult& result,
                                 const ReferenceCriteria& criteria);

struct AssociationRow {
  std::string taxon_id;
  std::string covariate;
  double estimate = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double fold_change = 0.0;  // exp(estimate) - 1
  int n_used = 0;            // overlap with the reference
  bool available = true;     // false when overlap < min_overlap
};

struct AssociationEstimates {
  std::string reference_taxon;
  double ci_level = 0.0;
  std::vector<AssociationRow> rows;
};

// Bootstrap Lasso + partial ridge estimates of the X coefficients for every
// set-A taxon's ratio regression against the final reference.
AssociationEstimates estimate_associations(const ValidatedDataset& dataset,
                                           const PhaseOneResult& result,
                                           const std::string& ref_taxon,
                                           const AnalysisConfig& config,
                                           std::uint64_t seed,
                                           unsigned threads = 1);

// Same machinery for an explicit taxon list (used by the analyze command's
// empty-set-B fallback and by tests). Bootstrap streams are derived per
// taxon id, so identical data yields identical estimates across references.
AssociationEstimates estimate_for_taxa(const ValidatedDataset& dataset,
                                       const std::vector<std::string>& taxa,
                                       const std::string& ref_taxon,
                                       const AnalysisConfig& config,
                                       std::uint64_t seed,
                                       unsigned threads = 1);

struct AveragedEstimates {
  std::vector<AssociationEstimates> per_reference;  // CIs live here
  AssociationEstimates averaged;  // point estimates only; CI fields are NaN
};

// Runs Phase 2 once per reference and averages the point estimates.
AveragedEstimates averaged_estimates(const ValidatedDataset& dataset,
                                     const PhaseOneResult& result,
                                     const std::vector<std::string>& refs,
                                     const AnalysisConfig& config,
                                     std::uint64_t seed, unsigned threads = 1);

void write_estimates_csv(const AssociationEstimates& estimates,
                         const std::string& path);

}  // namespace ifaa

#endif  // IFAA_PHASE2_HPP
