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

#include "ifaa/phase1.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ifaa/csv.hpp"
#include "ifaa/error.hpp"
#include "ifaa/parallel.hpp"
#include "ifaa/regression.hpp"
#include "ifaa/rng.hpp"

namespace ifaa {

namespace {

int taxon_index(const ValidatedDataset& ds, const std::string& taxon) {
  const auto& ids = ds.counts.taxon_ids;
  auto it = std::find(ids.begin(), ids.end(), taxon);
  if (it == ids.end())
    throw ValidationError("unknown taxon id '" + taxon + "'");
  return static_cast<int>(it - ids.begin());
}

RatioDataset build_ratios(const ValidatedDataset& ds, int ref, int min_overlap) {
  const std::size_t n = ds.counts.n_samples();
  const std::size_t k1 = ds.counts.n_taxa();
  const std::size_t q = ds.covariates.q();

  int ref_nonzero = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (ds.counts.counts(i, ref) > 0.0) ++ref_nonzero;
  if (ref_nonzero < min_overlap)
    throw ValidationError("reference taxon '" + ds.counts.taxon_ids[ref] +
                          "' has only " + std::to_string(ref_nonzero) +
                          " nonzero samples; need at least " +
                          std::to_string(min_overlap));

  RatioDataset rd;
  rd.ref_taxon = ds.counts.taxon_ids[ref];
  rd.ref_index = ref;
  rd.sample_idx.resize(k1);
  rd.response.resize(k1);
  rd.overlap.assign(k1, 0);
  rd.usable.assign(k1, 0);
  for (std::size_t k = 0; k < k1; ++k) {
    if (static_cast<int>(k) == ref) continue;
    auto& idx = rd.sample_idx[k];
    auto& resp = rd.response[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double yk = ds.counts.counts(i, k);
      const double yr = ds.counts.counts(i, ref);
      if (yk > 0.0 && yr > 0.0) {
        idx.push_back(static_cast<int>(i));
        // Ratio first: per-sample scale factors cancel in the quotient.
        resp.push_back(std::log(yk / yr));
      }
    }
    rd.overlap[k] = static_cast<int>(idx.size());

    // Usable means identifiable: enough paired observations AND contrast in
    // every tested covariate on those observations. Without contrast the
    // regression can never select the taxon, so such pairs must not feed
    // the permutation maxima either (usability is fixed before permuting).
    bool ok = rd.overlap[k] >= min_overlap;
    for (std::size_t c = 0; ok && c < q; ++c) {
      const double first = ds.covariates.x(idx[0], c);
      bool varies = false;
      for (std::size_t r = 1; r < idx.size(); ++r)
        if (ds.covariates.x(idx[r], c) != first) {
          varies = true;
          break;
        }
      ok = varies;
    }
    rd.usable[k] = ok ? 1 : 0;
  }
  return rd;
}

// Gathers the [X | W] design rows for one taxon's overlap samples. x_rows
// may be a permuted copy of the dataset's X matrix.
RegressionProblem ratio_problem(const ValidatedDataset& ds,
                                const RatioDataset& rd, std::size_t k,
                                const Matrix& x_rows) {
  const std::size_t q = ds.covariates.q();
  const std::size_t s = ds.covariates.s();
  const auto& idx = rd.sample_idx[k];

  RegressionProblem prob;
  prob.design = Matrix(idx.size(), q + s);
  prob.response = rd.response[k];
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const std::size_t i = static_cast<std::size_t>(idx[r]);
    for (std::size_t c = 0; c < q; ++c) prob.design(r, c) = x_rows(i, c);
    for (std::size_t c = 0; c < s; ++c)
      prob.design(r, q + c) = ds.covariates.w(i, c);
  }
  prob.penalty_mask.assign(q + s, 0);
  prob.standardize_mask.assign(q + s, 1);
  for (std::size_t c = 0; c < q; ++c) prob.penalty_mask[c] = 1;
  return prob;
}

// One pass over all taxa for a fixed reference. Fills z (0/1) and
// optionally accumulates the mean fitted X coefficient per taxon.
void selection_on_ratios(const ValidatedDataset& ds, const RatioDataset& rd,
                         const Matrix& x_rows, const AnalysisConfig& config,
                         std::vector<std::uint8_t>& z,
                         std::vector<double>* coef_acc) {
  const std::size_t k1 = ds.counts.n_taxa();
  const std::size_t q = ds.covariates.q();
  z.assign(k1, 0);
  for (std::size_t k = 0; k < k1; ++k) {
    if (!rd.usable[k]) continue;
    RegressionProblem prob = ratio_problem(ds, rd, k, x_rows);
    SparseFit fit =
        fit_mcp_regression(prob, config.mcp_gamma, config.lambda_grid_size);
    if (!fit.selected.empty()) z[k] = 1;
    if (coef_acc) {
      double mean_coef = 0.0;
      for (std::size_t c = 0; c < q; ++c) mean_coef += fit.coefficients[c];
      (*coef_acc)[k] += mean_coef / static_cast<double>(q);
    }
  }
}

struct RatioSet {
  std::vector<RatioDataset> per_ref;
  std::vector<char> usable_any;  // usable against at least one reference
};

RatioSet build_ratio_set(const ValidatedDataset& ds,
                         const std::vector<std::string>& refs,
                         const AnalysisConfig& config) {
  const int min_overlap =
      effective_min_overlap(config, ds.covariates.q(), ds.covariates.s());
  RatioSet rs;
  rs.usable_any.assign(ds.counts.n_taxa(), 0);
  for (const auto& ref : refs) {
    rs.per_ref.push_back(build_ratios(ds, taxon_index(ds, ref), min_overlap));
    const auto& rd = rs.per_ref.back();
    for (std::size_t k = 0; k < rd.usable.size(); ++k)
      if (rd.usable[k]) rs.usable_any[k] = 1;
  }
  return rs;
}

AccumulatedCounts accumulate_on(const ValidatedDataset& ds, const RatioSet& rs,
                                const Matrix& x_rows,
                                const AnalysisConfig& config, unsigned threads,
                                bool track_coefs) {
  const std::size_t k1 = ds.counts.n_taxa();
  const std::size_t r = rs.per_ref.size();
  std::vector<std::vector<std::uint8_t>> zr(r);
  std::vector<std::vector<double>> coefs(
      track_coefs ? r : 0, std::vector<double>(track_coefs ? k1 : 0, 0.0));

  parallel_for(r, threads, [&](std::size_t pass) {
    selection_on_ratios(ds, rs.per_ref[pass], x_rows, config, zr[pass],
                        track_coefs ? &coefs[pass] : nullptr);
  });

  AccumulatedCounts acc;
  acc.z.assign(k1, 0);
  acc.coef_sum.assign(k1, 0.0);
  for (std::size_t pass = 0; pass < r; ++pass) {
    for (std::size_t k = 0; k < k1; ++k) acc.z[k] += zr[pass][k];
    if (track_coefs)
      for (std::size_t k = 0; k < k1; ++k) acc.coef_sum[k] += coefs[pass][k];
  }
  return acc;
}

void check_reference_set(const ValidatedDataset& ds,
                         const std::vector<std::string>& refs) {
  if (refs.empty()) throw ValidationError("reference set is empty");
  for (std::size_t a = 0; a < refs.size(); ++a)
    for (std::size_t b = a + 1; b < refs.size(); ++b)
      if (refs[a] == refs[b])
        throw ValidationError("duplicate reference taxon '" + refs[a] + "'");
  for (const auto& ref : refs) taxon_index(ds, ref);
}

int nearest_rank_threshold(std::vector<int> maxima, double alpha) {
  std::sort(maxima.begin(), maxima.end());
  const double p = static_cast<double>(maxima.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * p));
  if (rank < 1) rank = 1;
  if (rank > maxima.size()) rank = maxima.size();
  return maxima[rank - 1];
}

}  // namespace

RatioDataset build_logratio_regression(const ValidatedDataset& dataset,
                                       const std::string& ref_taxon,
                                       const AnalysisConfig& config) {
  const int min_overlap = effective_min_overlap(config, dataset.covariates.q(),
                                                dataset.covariates.s());
  return build_ratios(dataset, taxon_index(dataset, ref_taxon), min_overlap);
}

std::vector<std::uint8_t> selection_pass(const ValidatedDataset& dataset,
                                         const std::string& ref_taxon,
                                         const AnalysisConfig& config) {
  RatioDataset rd = build_logratio_regression(dataset, ref_taxon, config);
  std::vector<std::uint8_t> z;
  selection_on_ratios(dataset, rd, dataset.covariates.x, config, z, nullptr);
  return z;
}

AccumulatedCounts accumulate_counts(const ValidatedDataset& dataset,
                                    const std::vector<std::string>& reference_set,
                                    const AnalysisConfig& config,
                                    unsigned threads) {
  check_reference_set(dataset, reference_set);
  RatioSet rs = build_ratio_set(dataset, reference_set, config);
  return accumulate_on(dataset, rs, dataset.covariates.x, config, threads,
                       /*track_coefs=*/true);
}

ExpectedCounts expected_counts(int k, int r, int m_a) {
  if (r < 2 || r > k + 1)
    throw ValidationError("expected_counts: need 2 <= R <= K+1");
  if (m_a < 0) throw ValidationError("expected_counts: negative m_a");
  const int m_b = k + 1 - m_a;
  if (m_b < 2)
    throw ValidationError(
        "expected_counts: need at least two independent taxa (m_b >= 2)");
  ExpectedCounts out;
  const double k1 = static_cast<double>(k + 1);
  out.k_a = static_cast<double>(k) * r / k1;
  out.k_b = static_cast<double>(r) * m_a / k1;
  out.mean_diff = static_cast<double>(m_b - 1) * r / k1;
  return out;
}

PermutationOutcome permutation_threshold(const ValidatedDataset& dataset,
                                         const std::vector<std::string>& reference_set,
                                         const AnalysisConfig& config,
                                         std::uint64_t seed, unsigned threads) {
  check_reference_set(dataset, reference_set);
  if (config.n_perms < 1)
    throw ValidationError("permutation_threshold: need at least one permutation");
  RatioSet rs = build_ratio_set(dataset, reference_set, config);

  const std::size_t n = dataset.counts.n_samples();
  const std::size_t q = dataset.covariates.q();
  const std::size_t p = static_cast<std::size_t>(config.n_perms);

  PermutationOutcome out;
  out.perm_maxima.assign(p, 0);
  parallel_for(p, threads, [&](std::size_t perm) {
    // Whole rows of X move together; counts and W stay in place.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(seed, {kStreamPerm, static_cast<std::uint64_t>(perm)}));
    rng.shuffle(order);

    Matrix xp(n, q);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < q; ++c)
        xp(i, c) = dataset.covariates.x(order[i], c);

    AccumulatedCounts acc =
        accumulate_on(dataset, rs, xp, config, 1, /*track_coefs=*/false);
    int cmax = 0;
    for (std::size_t k = 0; k < acc.z.size(); ++k)
      if (rs.usable_any[k] && acc.z[k] > cmax) cmax = acc.z[k];
    out.perm_maxima[perm] = cmax;
  });

  out.threshold = nearest_rank_threshold(out.perm_maxima, config.alpha);
  return out;
}

SetSplit identify_sets(const std::vector<int>& z, int threshold,
                       const std::vector<char>& usable) {
  if (threshold < 0) throw ValidationError("identify_sets: negative threshold");
  if (z.size() != usable.size())
    throw ValidationError("identify_sets: length mismatch");
  SetSplit split;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!usable[k]) continue;
    if (z[k] >= threshold)
      split.set_a.push_back(static_cast<int>(k));
    else
      split.set_b.push_back(static_cast<int>(k));
  }
  if (split.set_b.empty())
    throw EmptySetBError(
        "set B is empty: every usable taxon met the selection threshold, so "
        "no independent reference taxon exists; consider a larger alpha or "
        "more permutations");
  return split;
}

PhaseOneResult run_phase1(const ValidatedDataset& dataset,
                          const AnalysisConfig& config, unsigned threads) {
  validate_config(config, dataset.counts.n_taxa());
  const std::size_t k1 = dataset.counts.n_taxa();
  const std::size_t n = dataset.counts.n_samples();
  const int min_overlap = effective_min_overlap(config, dataset.covariates.q(),
                                                dataset.covariates.s());

  // Reference candidates need enough nonzero samples to anchor a ratio.
  std::vector<int> candidates;
  for (std::size_t k = 0; k < k1; ++k) {
    int nonzero = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (dataset.counts.counts(i, k) > 0.0) ++nonzero;
    if (nonzero >= min_overlap) candidates.push_back(static_cast<int>(k));
  }
  if (candidates.size() < static_cast<std::size_t>(config.r_refs))
    throw ValidationError(
        "only " + std::to_string(candidates.size()) +
        " taxa have enough nonzero samples to serve as references; need "
        "r_refs = " +
        std::to_string(config.r_refs) +
        " (lower r_refs or min_overlap, or provide denser data)");

  Rng rng(mix_seed(config.master_seed, {kStreamRefs}));
  rng.shuffle(candidates);
  std::vector<int> ref_idx(candidates.begin(), candidates.begin() + config.r_refs);
  std::sort(ref_idx.begin(), ref_idx.end());

  PhaseOneResult result;
  result.taxon_ids = dataset.counts.taxon_ids;
  for (int idx : ref_idx)
    result.reference_set.push_back(dataset.counts.taxon_ids[idx]);

  RatioSet rs = build_ratio_set(dataset, result.reference_set, config);
  AccumulatedCounts acc = accumulate_on(dataset, rs, dataset.covariates.x,
                                        config, threads, /*track_coefs=*/true);
  result.z_counts = acc.z;
  result.mean_x_coef.resize(k1);
  for (std::size_t k = 0; k < k1; ++k)
    result.mean_x_coef[k] = acc.coef_sum[k] / static_cast<double>(config.r_refs);

  PermutationOutcome perm = permutation_threshold(
      dataset, result.reference_set, config, config.master_seed, threads);
  result.perm_maxima = perm.perm_maxima;
  result.threshold = perm.threshold;

  for (std::size_t k = 0; k < k1; ++k) {
    if (!rs.usable_any[k]) {
      result.unusable.push_back(dataset.counts.taxon_ids[k]);
    } else if (result.z_counts[k] >= result.threshold) {
      result.set_a.push_back(dataset.counts.taxon_ids[k]);
    } else {
      result.set_b.push_back(dataset.counts.taxon_ids[k]);
    }
  }
  return result;
}

void write_heatmap_csv(const ValidatedDataset& dataset,
                       const PhaseOneResult& result, const std::string& path,
                       int floor) {
  const std::size_t n = dataset.counts.n_samples();
  std::string out = "taxon_id";
  for (const auto& id : dataset.counts.sample_ids) out += "," + id;
  out += "\n";
  for (std::size_t k = 0; k < result.taxon_ids.size(); ++k) {
    if (result.z_counts[k] < floor) continue;
    out += result.taxon_ids[k];
    const int sign = result.mean_x_coef[k] < 0.0 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) {
      const bool present = dataset.counts.counts(i, k) > 0.0;
      out += "," + std::to_string(present ? sign * result.z_counts[k] : 0);
    }
    out += "\n";
  }
  write_text_file(path, out);
}

}  // namespace ifaa
