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

#include "ifaa/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ifaa/csv.hpp"
#include "ifaa/error.hpp"

namespace ifaa {

void validate_config(const AnalysisConfig& config, std::size_t n_taxa) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw ValidationError("alpha must be in (0,1)");
  if (config.r_refs < 2) throw ValidationError("r_refs must be >= 2");
  if (n_taxa > 0 && static_cast<std::size_t>(config.r_refs) > n_taxa)
    throw ValidationError("r_refs exceeds the number of taxa");
  if (config.n_perms < 1) throw ValidationError("n_perms must be >= 1");
  if (!(config.mcp_gamma > 1.0))
    throw ValidationError("mcp_gamma must be > 1");
  if (config.lambda_grid_size < 2)
    throw ValidationError("lambda_grid_size must be >= 2");
  if (config.bootstrap_reps < 1)
    throw ValidationError("bootstrap_reps must be >= 1");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0))
    throw ValidationError("ci_level must be in (0,1)");
  if (config.min_overlap < 0)
    throw ValidationError("min_overlap must be >= 0");
}

int effective_min_overlap(const AnalysisConfig& config, std::size_t q,
                          std::size_t s) {
  if (config.min_overlap > 0) return config.min_overlap;
  return std::max<int>(static_cast<int>(q + s) + 2, 10);
}

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what,
                  const std::string& path) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second)
      throw ValidationError(path + ": duplicate " + what + " id '" + id + "'");
  }
}

}  // namespace

CountMatrix load_count_table(const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.header.size() < 2)
    throw ParseError(path + ": expected 'sample_id' plus taxon columns");

  CountMatrix m;
  m.taxon_ids.assign(t.header.begin() + 1, t.header.end());
  m.counts = Matrix(t.rows.size(), m.taxon_ids.size());
  m.sample_ids.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    m.sample_ids.push_back(row[0]);
    for (std::size_t j = 1; j < row.size(); ++j) {
      std::string context = path + ": row '" + row[0] + "', column '" +
                            t.header[j] + "'";
      double v = parse_double_cell(row[j], context);
      if (v < 0.0)
        throw ValidationError("negative count at " + context);
      m.counts(i, j - 1) = v;
    }
  }
  check_unique(m.sample_ids, "sample", path);
  check_unique(m.taxon_ids, "taxon", path);
  return m;
}

void write_count_table(const CountMatrix& m, const std::string& path) {
  std::string out = "sample_id";
  for (const auto& id : m.taxon_ids) out += "," + id;
  out += "\n";
  for (std::size_t i = 0; i < m.n_samples(); ++i) {
    out += m.sample_ids[i];
    for (std::size_t j = 0; j < m.n_taxa(); ++j)
      out += "," + format_double(m.counts(i, j));
    out += "\n";
  }
  write_text_file(path, out);
}

CovariateTable load_covariates(const std::string& path,
                               const std::vector<std::string>& x_names,
                               const std::vector<std::string>& w_names) {
  if (x_names.empty())
    throw ValidationError(path + ": at least one tested covariate is required");
  for (const auto& xn : x_names)
    if (std::find(w_names.begin(), w_names.end(), xn) != w_names.end())
      throw ValidationError("covariate '" + xn +
                            "' listed in both tested and adjustment sets");

  CsvTable t = read_csv(path);
  std::unordered_map<std::string, std::size_t> col_index;
  for (std::size_t j = 1; j < t.header.size(); ++j) col_index[t.header[j]] = j;

  auto locate = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it == col_index.end())
      throw ValidationError(path + ": missing covariate column '" + name + "'");
    return it->second;
  };

  std::vector<std::size_t> x_cols, w_cols;
  for (const auto& n : x_names) x_cols.push_back(locate(n));
  for (const auto& n : w_names) w_cols.push_back(locate(n));

  CovariateTable c;
  c.x_names = x_names;
  c.w_names = w_names;
  c.x = Matrix(t.rows.size(), x_names.size());
  c.w = Matrix(t.rows.size(), w_names.size());
  c.sample_ids.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    c.sample_ids.push_back(row[0]);
    for (std::size_t k = 0; k < x_cols.size(); ++k) {
      c.x(i, k) = parse_double_cell(
          row[x_cols[k]],
          path + ": row '" + row[0] + "', column '" + x_names[k] + "'");
    }
    for (std::size_t k = 0; k < w_cols.size(); ++k) {
      c.w(i, k) = parse_double_cell(
          row[w_cols[k]],
          path + ": row '" + row[0] + "', column '" + w_names[k] + "'");
    }
  }
  check_unique(c.sample_ids, "sample", path);
  return c;
}

ValidatedDataset validate_dataset(const CountMatrix& counts,
                                  const CovariateTable& covariates,
                                  const AnalysisConfig& config) {
  validate_config(config);

  std::unordered_map<std::string, std::size_t> cov_row;
  for (std::size_t i = 0; i < covariates.sample_ids.size(); ++i)
    cov_row[covariates.sample_ids[i]] = i;

  ValidatedDataset out;

  // Pass 1: keep samples present in both tables with >= 2 nonzero taxa.
  // A sample with fewer nonzero taxa can never enter a ratio.
  std::vector<std::size_t> keep_rows, cov_rows;
  for (std::size_t i = 0; i < counts.n_samples(); ++i) {
    const std::string& id = counts.sample_ids[i];
    auto it = cov_row.find(id);
    if (it == cov_row.end()) {
      out.dropped_samples.push_back({id, "no covariate row"});
      continue;
    }
    int nonzero = 0;
    for (std::size_t j = 0; j < counts.n_taxa() && nonzero < 2; ++j)
      if (counts.counts(i, j) > 0.0) ++nonzero;
    if (nonzero < 2) {
      out.dropped_samples.push_back({id, "fewer than 2 nonzero taxa"});
      continue;
    }
    keep_rows.push_back(i);
    cov_rows.push_back(it->second);
  }
  if (keep_rows.empty())
    throw ValidationError(
        "no usable samples: count and covariate tables share no sample with "
        "at least two nonzero taxa");

  // Pass 2: drop taxa that are zero in every retained sample. Column drops
  // cannot push a retained row below two nonzeros, so one pass suffices.
  std::vector<std::size_t> keep_cols;
  for (std::size_t j = 0; j < counts.n_taxa(); ++j) {
    bool any = false;
    for (std::size_t r : keep_rows)
      if (counts.counts(r, j) > 0.0) {
        any = true;
        break;
      }
    if (any)
      keep_cols.push_back(j);
    else
      out.dropped_taxa.push_back({counts.taxon_ids[j], "all-zero taxon"});
  }
  if (keep_cols.size() < 2)
    throw ValidationError("fewer than 2 taxa with nonzero counts remain");

  out.counts.sample_ids.reserve(keep_rows.size());
  for (std::size_t r : keep_rows)
    out.counts.sample_ids.push_back(counts.sample_ids[r]);
  out.counts.taxon_ids.reserve(keep_cols.size());
  for (std::size_t c : keep_cols)
    out.counts.taxon_ids.push_back(counts.taxon_ids[c]);
  out.counts.counts = Matrix(keep_rows.size(), keep_cols.size());
  for (std::size_t i = 0; i < keep_rows.size(); ++i)
    for (std::size_t j = 0; j < keep_cols.size(); ++j)
      out.counts.counts(i, j) = counts.counts(keep_rows[i], keep_cols[j]);

  out.covariates.sample_ids = out.counts.sample_ids;
  out.covariates.x_names = covariates.x_names;
  out.covariates.w_names = covariates.w_names;
  out.covariates.x = Matrix(keep_rows.size(), covariates.q());
  out.covariates.w = Matrix(keep_rows.size(), covariates.s());
  for (std::size_t i = 0; i < keep_rows.size(); ++i) {
    for (std::size_t k = 0; k < covariates.q(); ++k)
      out.covariates.x(i, k) = covariates.x(cov_rows[i], k);
    for (std::size_t k = 0; k < covariates.s(); ++k)
      out.covariates.w(i, k) = covariates.w(cov_rows[i], k);
  }

  // Constant tested covariates carry no contrast and would silently select
  // nothing; reject them loudly instead.
  for (std::size_t k = 0; k < out.covariates.q(); ++k) {
    double first = out.covariates.x(0, k);
    bool constant = true;
    for (std::size_t i = 1; i < keep_rows.size(); ++i)
      if (out.covariates.x(i, k) != first) {
        constant = false;
        break;
      }
    if (constant)
      throw ValidationError("tested covariate '" + out.covariates.x_names[k] +
                            "' is constant across retained samples");
  }

  return out;
}

}  // namespace ifaa
