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

#include "ifaa/phase2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ifaa/csv.hpp"
#include "ifaa/error.hpp"
#include "ifaa/parallel.hpp"
#include "ifaa/regression.hpp"
#include "ifaa/rng.hpp"

namespace ifaa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int index_of(const std::vector<std::string>& ids, const std::string& id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw ValidationError("unknown taxon id '" + id + "'");
  return static_cast<int>(it - ids.begin());
}

double prevalence_of(const ValidatedDataset& ds, int k) {
  const std::size_t n = ds.counts.n_samples();
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (ds.counts.counts(i, k) > 0.0) ++nonzero;
  return static_cast<double>(nonzero) / static_cast<double>(n);
}

double log_variance_nonzero(const ValidatedDataset& ds, int k) {
  std::vector<double> logs;
  for (std::size_t i = 0; i < ds.counts.n_samples(); ++i)
    if (ds.counts.counts(i, k) > 0.0)
      logs.push_back(std::log(ds.counts.counts(i, k)));
  if (logs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : logs) mean += v;
  mean /= logs.size();
  double var = 0.0;
  for (double v : logs) var += (v - mean) * (v - mean);
  return var / logs.size();
}

// Two-group structure of a binary tested covariate, or empty if X is not a
// single two-valued column.
std::vector<std::vector<std::size_t>> binary_groups(const ValidatedDataset& ds) {
  if (ds.covariates.q() != 1) return {};
  std::set<double> levels;
  for (std::size_t i = 0; i < ds.covariates.n_samples(); ++i)
    levels.insert(ds.covariates.x(i, 0));
  if (levels.size() != 2) return {};
  std::vector<std::vector<std::size_t>> groups(2);
  const double lo = *levels.begin();
  for (std::size_t i = 0; i < ds.covariates.n_samples(); ++i)
    groups[ds.covariates.x(i, 0) == lo ? 0 : 1].push_back(i);
  return groups;
}

}  // namespace

ReferenceChoice choose_reference(const ValidatedDataset& dataset,
                                 const PhaseOneResult& result,
                                 const ReferenceCriteria& criteria) {
  if (result.set_b.empty())
    throw ValidationError("choose_reference: set B is empty");
  if (!(criteria.min_prevalence > 0.0 && criteria.min_prevalence < 1.0))
    throw ValidationError("choose_reference: min_prevalence must be in (0,1)");
  if (!(criteria.min_variance > 0.0))
    throw ValidationError("choose_reference: min_variance must be positive");

  // First tertile of the set-A selection counts, if that screen is enabled
  // and set A is nonempty.
  int tertile = 0;
  bool have_tertile = false;
  if (criteria.z_tertile_cut && !result.set_a.empty()) {
    std::vector<int> a_counts;
    for (const auto& id : result.set_a)
      a_counts.push_back(result.z_counts[index_of(result.taxon_ids, id)]);
    std::sort(a_counts.begin(), a_counts.end());
    std::size_t rank = (a_counts.size() + 2) / 3;  // ceil(|A|/3)
    tertile = a_counts[rank - 1];
    have_tertile = true;
  }

  const auto groups = binary_groups(dataset);

  struct Candidate {
    std::string id;
    int z;
    double prevalence;
    bool passes;
  };
  std::vector<Candidate> candidates;
  for (const auto& id : result.set_b) {
    const int k = index_of(dataset.counts.taxon_ids, id);
    Candidate c;
    c.id = id;
    c.z = result.z_counts[index_of(result.taxon_ids, id)];
    c.prevalence = prevalence_of(dataset, k);
    c.passes = c.prevalence >= criteria.min_prevalence;
    if (c.passes && criteria.per_group_prevalence && !groups.empty()) {
      for (const auto& g : groups) {
        std::size_t nonzero = 0;
        for (std::size_t i : g)
          if (dataset.counts.counts(i, k) > 0.0) ++nonzero;
        if (static_cast<double>(nonzero) <
            criteria.min_prevalence * static_cast<double>(g.size())) {
          c.passes = false;
          break;
        }
      }
    }
    if (c.passes && have_tertile && c.z > tertile) c.passes = false;
    if (c.passes && log_variance_nonzero(dataset, k) < criteria.min_variance)
      c.passes = false;
    candidates.push_back(std::move(c));
  }

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.prevalence != b.prevalence) return a.prevalence > b.prevalence;
    return a.id < b.id;
  };

  ReferenceChoice choice;
  const Candidate* best = nullptr;
  for (const auto& c : candidates)
    if (c.passes && (!best || better(c, *best))) best = &c;
  if (!best) {
    for (const auto& c : candidates)
      if (!best || better(c, *best)) best = &c;
    choice.fallback = true;
    choice.notes.push_back(
        "no set-B taxon passed the reference criteria; using the "
        "smallest-count candidate '" +
        best->id + "'");
  }
  choice.taxon = best->id;
  return choice;
}

AssociationEstimates estimate_for_taxa(const ValidatedDataset& dataset,
                                       const std::vector<std::string>& taxa,
                                       const std::string& ref_taxon,
                                       const AnalysisConfig& config,
                                       std::uint64_t seed, unsigned threads) {
  const int ref = index_of(dataset.counts.taxon_ids, ref_taxon);
  for (const auto& t : taxa)
    if (t == ref_taxon)
      throw ValidationError(
          "estimate_for_taxa: the reference taxon cannot be estimated "
          "against itself");

  RatioDataset rd = build_logratio_regression(dataset, ref_taxon, config);
  const std::size_t q = dataset.covariates.q();
  const std::size_t s = dataset.covariates.s();

  AssociationEstimates est;
  est.reference_taxon = ref_taxon;
  est.ci_level = config.ci_level;
  est.rows.resize(taxa.size() * q);

  parallel_for(taxa.size(), threads, [&](std::size_t t) {
    const int k = index_of(dataset.counts.taxon_ids, taxa[t]);
    AssociationRow base;
    base.taxon_id = taxa[t];
    base.n_used = rd.overlap[k];

    if (!rd.usable[k]) {
      // Not enough paired observations (or no covariate contrast) against
      // this reference; reported rather than silently dropped.
      for (std::size_t c = 0; c < q; ++c) {
        AssociationRow row = base;
        row.covariate = dataset.covariates.x_names[c];
        row.available = false;
        row.estimate = row.ci_lower = row.ci_upper = row.fold_change = kNaN;
        est.rows[t * q + c] = std::move(row);
      }
      return;
    }

    const auto& idx = rd.sample_idx[k];
    RegressionProblem prob;
    prob.design = Matrix(idx.size(), q + s);
    prob.response = rd.response[k];
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < q; ++c)
        prob.design(r, c) = dataset.covariates.x(idx[r], c);
      for (std::size_t c = 0; c < s; ++c)
        prob.design(r, q + c) = dataset.covariates.w(idx[r], c);
    }
    prob.penalty_mask.assign(q + s, 0);
    prob.standardize_mask.assign(q + s, 1);
    for (std::size_t c = 0; c < q; ++c) prob.penalty_mask[c] = 1;

    // Streams keyed by the taxon, not the reference, so identical references
    // reproduce identical draws.
    const std::uint64_t taxon_seed =
        mix_seed(seed, {kStreamTaxon, static_cast<std::uint64_t>(k)});
    prob.fold_seed = mix_seed(taxon_seed, {kStreamFolds});

    EstimateWithCI ci = bootstrap_lpr_ci(prob, config, taxon_seed, 1);
    for (std::size_t c = 0; c < q; ++c) {
      AssociationRow row = base;
      row.covariate = dataset.covariates.x_names[c];
      row.estimate = ci.estimate[c];
      row.ci_lower = ci.lower[c];
      row.ci_upper = ci.upper[c];
      row.fold_change = std::expm1(ci.estimate[c]);
      est.rows[t * q + c] = std::move(row);
    }
  });

  return est;
}

AssociationEstimates estimate_associations(const ValidatedDataset& dataset,
                                           const PhaseOneResult& result,
                                           const std::string& ref_taxon,
                                           const AnalysisConfig& config,
                                           std::uint64_t seed,
                                           unsigned threads) {
  if (std::find(result.set_b.begin(), result.set_b.end(), ref_taxon) ==
      result.set_b.end())
    throw ValidationError("estimate_associations: reference taxon '" +
                          ref_taxon + "' is not in set B");
  return estimate_for_taxa(dataset, result.set_a, ref_taxon, config, seed,
                           threads);
}

AveragedEstimates averaged_estimates(const ValidatedDataset& dataset,
                                     const PhaseOneResult& result,
                                     const std::vector<std::string>& refs,
                                     const AnalysisConfig& config,
                                     std::uint64_t seed, unsigned threads) {
  if (refs.empty())
    throw ValidationError("averaged_estimates: empty reference list");

  AveragedEstimates out;
  for (const auto& ref : refs)
    out.per_reference.push_back(
        estimate_associations(dataset, result, ref, config, seed, threads));

  out.averaged.reference_taxon = "average";
  out.averaged.ci_level = config.ci_level;

  // Average available point estimates per (taxon, covariate), in the row
  // order of the first reference run.
  const auto& first = out.per_reference.front();
  for (std::size_t r = 0; r < first.rows.size(); ++r) {
    AssociationRow row = first.rows[r];
    double sum = 0.0;
    int used = 0;
    int n_min = 0;
    for (const auto& per_ref : out.per_reference) {
      const auto& src = per_ref.rows[r];
      if (!src.available) continue;
      sum += src.estimate;
      n_min = used == 0 ? src.n_used : std::min(n_min, src.n_used);
      ++used;
    }
    row.available = used > 0;
    row.estimate = row.available ? sum / used : kNaN;
    row.fold_change = row.available ? std::expm1(row.estimate) : kNaN;
    row.ci_lower = kNaN;
    row.ci_upper = kNaN;
    row.n_used = row.available ? n_min : 0;
    out.averaged.rows.push_back(std::move(row));
  }
  return out;
}

void write_estimates_csv(const AssociationEstimates& estimates,
                         const std::string& path) {
  auto cell = [](double v) {
    return std::isnan(v) ? std::string("NA") : format_double(v);
  };
  std::string out =
      "taxon_id,covariate,estimate,ci_lower,ci_upper,fold_change,n_used,"
      "reference_taxon\n";
  for (const auto& row : estimates.rows) {
    out += row.taxon_id + "," + row.covariate + "," + cell(row.estimate) +
           "," + cell(row.ci_lower) + "," + cell(row.ci_upper) + "," +
           cell(row.fold_change) + "," + std::to_string(row.n_used) + "," +
           estimates.reference_taxon + "\n";
  }
  write_text_file(path, out);
}

}  // namespace ifaa
