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

#include "ifaa/ziln_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ifaa/error.hpp"
#include "ifaa/kv_config.hpp"
#include "ifaa/rng.hpp"

namespace ifaa {

namespace {

constexpr std::uint64_t kInterceptTag = 0x1f7a;

std::string padded_id(const char* prefix, std::size_t index, std::size_t total) {
  std::size_t width = 1;
  for (std::size_t t = total; t >= 10; t /= 10) ++width;
  std::string digits = std::to_string(index + 1);
  return std::string(prefix) +
         std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

// Split n into three integer counts matching the given fractions.
void counts_from_mix(int n, const double mix[3], int out[3]) {
  out[0] = static_cast<int>(std::lround(mix[0] * n));
  out[1] = static_cast<int>(std::lround(mix[1] * n));
  out[2] = n - out[0] - out[1];
  while (out[2] < 0) {
    if (out[1] > 0)
      --out[1];
    else
      --out[0];
    ++out[2];
  }
}

}  // namespace

void validate_params(const ZilnParams& params) {
  const std::size_t k1 = params.mu.size();
  if (k1 == 0) throw ValidationError("ziln params: empty mean vector");
  if (params.sigma.rows() != k1 || params.sigma.cols() != k1)
    throw ValidationError("ziln params: sigma shape does not match mu");
  for (std::size_t i = 0; i < k1; ++i) {
    if (params.sigma(i, i) < 0.0)
      throw ValidationError("ziln params: negative variance on sigma diagonal");
    for (std::size_t j = i + 1; j < k1; ++j)
      if (std::fabs(params.sigma(i, j) - params.sigma(j, i)) >
          1e-12 * (1.0 + std::fabs(params.sigma(i, j))))
        throw ValidationError("ziln params: sigma not symmetric");
  }
  if (params.random_intercept_sd < 0.0)
    throw ValidationError("ziln params: negative random_intercept_sd");

  const bool has_masses = !params.presence_masses.empty();
  const bool has_probs = !params.presence_probs.empty();
  if (has_masses == has_probs)
    throw ValidationError(
        "ziln params: supply exactly one of presence_masses or presence_probs");

  if (has_masses) {
    double total = 0.0;
    for (const auto& m : params.presence_masses) {
      if (m.prob < 0.0)
        throw ValidationError("ziln params: negative subset mass");
      if (m.taxa.empty())
        throw ValidationError(
            "ziln params: the empty presence pattern carries no mass");
      for (std::size_t i = 0; i < m.taxa.size(); ++i) {
        if (m.taxa[i] < 0 || m.taxa[i] >= static_cast<int>(k1))
          throw ValidationError("ziln params: subset index out of range");
        if (i > 0 && m.taxa[i] <= m.taxa[i - 1])
          throw ValidationError(
              "ziln params: subset indices must be strictly increasing");
      }
      total += m.prob;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw ValidationError("ziln params: presence masses sum to " +
                            std::to_string(total) + ", expected 1");
  } else {
    if (params.presence_probs.size() != k1)
      throw ValidationError("ziln params: presence_probs length mismatch");
    bool any = false;
    for (double p : params.presence_probs) {
      if (p < 0.0 || p > 1.0)
        throw ValidationError("ziln params: presence prob outside [0,1]");
      if (p > 0.0) any = true;
    }
    if (!any)
      throw ValidationError(
          "ziln params: all presence probabilities are zero (all mass on the "
          "empty pattern)");
  }
}

CountMatrix sample_ziln(const ZilnParams& params, int n, std::uint64_t seed) {
  validate_params(params);
  if (n < 1) throw ValidationError("sample_ziln: n must be >= 1");
  const std::size_t k1 = params.mu.size();

  // Factor cache keyed by presence pattern; explicit-mass mode has few
  // distinct patterns, factorized mode is capped to avoid unbounded growth.
  std::map<std::vector<int>, Matrix> factor_cache;
  auto factor_for = [&](const std::vector<int>& subset) -> Matrix {
    auto it = factor_cache.find(subset);
    if (it != factor_cache.end()) return it->second;
    const std::size_t l = subset.size();
    Matrix sub(l, l);
    for (std::size_t a = 0; a < l; ++a)
      for (std::size_t b = 0; b < l; ++b)
        sub(a, b) = params.sigma(subset[a], subset[b]);
    Matrix fac;
    try {
      fac = psd_cholesky(sub);
    } catch (const Error&) {
      throw ValidationError(
          "sample_ziln: sigma submatrix for a presence pattern is not "
          "positive semidefinite");
    }
    if (factor_cache.size() < 64) factor_cache.emplace(subset, fac);
    return fac;
  };

  CountMatrix out;
  out.counts = Matrix(static_cast<std::size_t>(n), k1, 0.0);
  for (int i = 0; i < n; ++i)
    out.sample_ids.push_back(padded_id("s", i, n));
  for (std::size_t j = 0; j < k1; ++j)
    out.taxon_ids.push_back(padded_id("t", j, k1));

  std::vector<int> subset;
  std::vector<double> z, logy;
  for (int i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, {kStreamSubject, static_cast<std::uint64_t>(i)}));

    subset.clear();
    if (!params.presence_masses.empty()) {
      double u = rng.uniform();
      double cum = 0.0;
      const SubsetMass* chosen = &params.presence_masses.back();
      for (const auto& m : params.presence_masses) {
        cum += m.prob;
        if (u < cum) {
          chosen = &m;
          break;
        }
      }
      subset = chosen->taxa;
    } else {
      int attempts = 0;
      do {
        if (++attempts > 10000)
          throw Error("sample_ziln: could not draw a nonempty presence "
                      "pattern in 10000 attempts");
        subset.clear();
        for (std::size_t j = 0; j < k1; ++j)
          if (rng.bernoulli(params.presence_probs[j]))
            subset.push_back(static_cast<int>(j));
      } while (subset.empty());
    }

    const std::size_t l = subset.size();
    Matrix fac = factor_for(subset);
    z.resize(l);
    for (std::size_t a = 0; a < l; ++a) z[a] = rng.normal();
    logy.assign(l, 0.0);
    for (std::size_t a = 0; a < l; ++a) {
      double v = params.mu[subset[a]];
      for (std::size_t b = 0; b <= a; ++b) v += fac(a, b) * z[b];
      logy[a] = v;
    }

    if (params.random_intercept_sd > 0.0) {
      // Drawn from its own substream so it cannot shift the draws above.
      Rng urng(mix_seed(seed, {kStreamSubject, static_cast<std::uint64_t>(i),
                               kInterceptTag}));
      double u = urng.normal(0.0, params.random_intercept_sd);
      for (std::size_t a = 0; a < l; ++a) logy[a] += u;
    }

    for (std::size_t a = 0; a < l; ++a)
      out.counts(static_cast<std::size_t>(i), subset[a]) = std::exp(logy[a]);
  }
  return out;
}

void validate_scenario(const SimScenario& sc) {
  if (sc.n_subjects < 1) throw ValidationError("scenario: n_subjects must be >= 1");
  if (sc.n_taxa < 2) throw ValidationError("scenario: n_taxa must be >= 2");
  if (sc.frac_differential < 0.0 || sc.frac_differential > 1.0)
    throw ValidationError("scenario: frac_differential must be in [0,1]");
  auto check_mix = [](const double m[3], const char* name) {
    double total = m[0] + m[1] + m[2];
    if (m[0] < 0 || m[1] < 0 || m[2] < 0 || std::fabs(total - 1.0) > 1e-12)
      throw ValidationError(std::string("scenario: ") + name +
                            " fractions must be nonnegative and sum to 1");
  };
  check_mix(sc.abundance_mix, "abundance_mix");
  check_mix(sc.diff_mix, "diff_mix");
  for (double a : sc.gamma_shapes)
    if (!(a > 0.0)) throw ValidationError("scenario: gamma shapes must be > 0");
  for (const auto& r : sc.diff_ranges)
    if (!(r.first > 0.0) || r.second < r.first)
      throw ValidationError("scenario: diff ranges must satisfy 0 < u1 <= u2");
  if (!(sc.c1 > 0.0 && sc.c1 <= 1.0))
    throw ValidationError("scenario: c1 must be in (0,1]");
  if (!(sc.c2 > 0.0 && sc.c2 <= 1.0))
    throw ValidationError("scenario: c2 must be in (0,1]");
}

SimScenario scenario_from_file(const std::string& path) {
  KvConfig kv = KvConfig::parse_file(path);
  SimScenario sc;
  sc.n_subjects = static_cast<int>(kv.get_int("n_subjects", sc.n_subjects));
  sc.n_taxa = static_cast<int>(kv.get_int("n_taxa", sc.n_taxa));
  sc.frac_differential =
      kv.get_double("frac_differential", sc.frac_differential);

  auto load_triple = [&](const char* key, double out[3]) {
    if (!kv.has(key)) return;
    auto v = kv.get_double_list(key);
    if (v.size() != 3)
      throw ValidationError(path + ": key '" + key + "' needs 3 values");
    out[0] = v[0];
    out[1] = v[1];
    out[2] = v[2];
  };
  load_triple("abundance_mix", sc.abundance_mix);
  load_triple("gamma_shapes", sc.gamma_shapes);
  load_triple("diff_mix", sc.diff_mix);

  const char* range_keys[3] = {"diff_range_low", "diff_range_med",
                               "diff_range_high"};
  for (int c = 0; c < 3; ++c) {
    if (!kv.has(range_keys[c])) continue;
    auto v = kv.get_double_list(range_keys[c]);
    if (v.size() != 2)
      throw ValidationError(path + ": key '" + std::string(range_keys[c]) +
                            "' needs 2 values");
    sc.diff_ranges[c] = {v[0], v[1]};
  }

  sc.c1 = kv.get_double("c1", sc.c1);
  sc.c2 = kv.get_double("c2", sc.c2);
  sc.seed = kv.get_uint64("seed", sc.seed);
  validate_scenario(sc);
  return sc;
}

CountMatrix apply_sampling_fraction(const CountMatrix& true_counts,
                                    const std::vector<double>& c) {
  if (c.size() != true_counts.n_samples())
    throw ValidationError("apply_sampling_fraction: c length mismatch");
  for (double ci : c)
    if (!(ci > 0.0 && ci <= 1.0))
      throw ValidationError(
          "apply_sampling_fraction: sampling fraction outside (0,1]");

  CountMatrix out = true_counts;
  for (std::size_t i = 0; i < out.n_samples(); ++i)
    for (std::size_t j = 0; j < out.n_taxa(); ++j)
      out.counts(i, j) = std::floor(c[i] * true_counts.counts(i, j));
  return out;
}

double zero_truncated_poisson_log_mean(double lambda) {
  if (!(lambda > 0.0))
    throw ValidationError("zero_truncated_poisson_log_mean: lambda must be > 0");
  const double sd = std::sqrt(lambda);
  const long long lo =
      std::max<long long>(1, static_cast<long long>(lambda - 12.0 * sd) - 30);
  const long long hi = static_cast<long long>(lambda + 12.0 * sd) + 50;
  double acc = 0.0;
  for (long long k = lo; k <= hi; ++k) {
    double logpmf = k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
    acc += std::exp(logpmf) * std::log(static_cast<double>(k));
  }
  return acc / (-std::expm1(-lambda));
}

std::vector<double> true_effects(const SimulatedStudy& study) {
  std::vector<double> out(study.lambda.size(), 0.0);
  for (std::size_t j = 0; j < study.lambda.size(); ++j) {
    if (study.lambda_shift[j] == 0.0) continue;
    out[j] = zero_truncated_poisson_log_mean(study.lambda[j] +
                                             study.lambda_shift[j]) -
             zero_truncated_poisson_log_mean(study.lambda[j]);
  }
  return out;
}

SimulatedStudy generate_benchmark(const SimScenario& sc,
                                  std::uint64_t data_seed) {
  validate_scenario(sc);
  const int k = sc.n_taxa;
  const int n = sc.n_subjects;

  // Taxon-level parameters depend only on the scenario seed so replicate
  // datasets reuse one parameter set.
  Rng prng(mix_seed(sc.seed, {kStreamParams}));

  int abundance_counts[3];  // high, med, low
  counts_from_mix(k, sc.abundance_mix, abundance_counts);
  std::vector<int> abundance_class(k);  // 0 low, 1 med, 2 high
  {
    int pos = 0;
    for (int i = 0; i < abundance_counts[0]; ++i) abundance_class[pos++] = 2;
    for (int i = 0; i < abundance_counts[1]; ++i) abundance_class[pos++] = 1;
    while (pos < k) abundance_class[pos++] = 0;
    prng.shuffle(abundance_class);
  }

  SimulatedStudy study;
  study.lambda.resize(k);
  for (int j = 0; j < k; ++j)
    study.lambda[j] = prng.gamma(sc.gamma_shapes[abundance_class[j]]);

  const int n_diff = static_cast<int>(std::lround(sc.frac_differential * k));
  std::vector<int> order(k);
  for (int j = 0; j < k; ++j) order[j] = j;
  prng.shuffle(order);

  int diff_counts[3];  // low, med, high shift classes
  counts_from_mix(n_diff, sc.diff_mix, diff_counts);
  std::vector<int> shift_labels;
  for (int c = 0; c < 3; ++c)
    shift_labels.insert(shift_labels.end(), diff_counts[c], c);
  prng.shuffle(shift_labels);

  study.is_differential.assign(k, 0);
  study.lambda_shift.assign(k, 0.0);
  study.shift_class.assign(k, -1);
  for (int d = 0; d < n_diff; ++d) {
    int j = order[d];
    int cls = shift_labels[d];
    study.is_differential[j] = 1;
    study.shift_class[j] = cls;
    study.lambda_shift[j] =
        prng.uniform(sc.diff_ranges[cls].first, sc.diff_ranges[cls].second);
  }

  study.true_effect = true_effects(study);

  // Subject-level draws come from per-subject substreams of data_seed.
  study.true_counts.counts = Matrix(n, k);
  std::vector<double> group(n);
  std::vector<double> c(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(mix_seed(data_seed, {kStreamSubject, static_cast<std::uint64_t>(i)}));
    const bool g2 = rng.bernoulli(0.5);
    group[i] = g2 ? 1.0 : 0.0;
    c[i] = g2 ? sc.c2 : sc.c1;
    for (int j = 0; j < k; ++j) {
      double mean = study.lambda[j] + (g2 ? study.lambda_shift[j] : 0.0);
      study.true_counts.counts(i, j) =
          static_cast<double>(rng.poisson(mean));
    }
  }
  for (int i = 0; i < n; ++i)
    study.true_counts.sample_ids.push_back(padded_id("s", i, n));
  for (int j = 0; j < k; ++j)
    study.true_counts.taxon_ids.push_back(padded_id("t", j, k));

  study.observed_counts = apply_sampling_fraction(study.true_counts, c);

  study.covariates.sample_ids = study.true_counts.sample_ids;
  study.covariates.x_names = {"group"};
  study.covariates.x = Matrix(n, 1);
  for (int i = 0; i < n; ++i) study.covariates.x(i, 0) = group[i];
  study.covariates.w = Matrix(n, 0);

  return study;
}

std::pair<double, double> dispersion_envelope(double c_var, double c_sq_mean,
                                              double y_true_var,
                                              double y_true_mean) {
  if (c_var < 0.0 || y_true_var < 0.0)
    throw ValidationError("dispersion_envelope: negative variance input");
  if (c_sq_mean < c_var)
    throw ValidationError(
        "dispersion_envelope: E(C^2) cannot be smaller than var(C)");
  const double second_moment = y_true_var + y_true_mean * y_true_mean;
  return {c_var * second_moment, c_sq_mean * second_moment};
}

}  // namespace ifaa
