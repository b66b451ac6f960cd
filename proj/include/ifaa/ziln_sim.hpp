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

#ifndef IFAA_ZILN_SIM_HPP
#define IFAA_ZILN_SIM_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ifaa/data_model.hpp"
#include "ifaa/matrix.hpp"

namespace ifaa {

// Probability mass on one presence pattern: the listed (0-based, strictly
// increasing) taxa are nonzero, all others are zero.
struct SubsetMass {
  std::vector<int> taxa;
  double prob;
};

// Zero-inflated log-normal generator parameters. The discrete part is either
// an explicit sparse list of subset masses or, as a convenience for large K,
// factorized per-taxon presence probabilities (conditioned on at least one
// taxon being present). Exactly one of the two must be supplied.
struct ZilnParams {
  std::vector<double> mu;              // log-scale means, length K+1
  Matrix sigma;                        // (K+1)x(K+1), symmetric PSD
  std::vector<SubsetMass> presence_masses;
  std::vector<double> presence_probs;  // factorized alternative
  double random_intercept_sd = 0.0;    // shared per-subject log-scale shift
};

void validate_params(const ZilnParams& params);

// Draws n subjects: presence pattern, then the multivariate normal over the
// present taxa using the pattern-indexed sub-mean and sub-covariance, then
// exponentiation. Absent taxa are exactly zero. Per-subject substreams are
// derived from `seed`, and the shared intercept draw never perturbs the
// other draws, so runs with random_intercept_sd on and off share the same
// underlying log-abundances.
CountMatrix sample_ziln(const ZilnParams& params, int n, std::uint64_t seed);

// Benchmark generator settings: two groups of subjects, per-taxon Poisson
// means drawn once from gamma distributions, a fixed fraction of taxa given
// an additive group-2 shift, and group-wise sampling fractions that turn the
// true counts into observed counts.
struct SimScenario {
  int n_subjects = 50;
  int n_taxa = 500;
  double frac_differential = 0.25;
  double abundance_mix[3] = {0.10, 0.30, 0.60};   // high, med, low
  double gamma_shapes[3] = {50.0, 200.0, 10000.0};  // low, med, high
  std::pair<double, double> diff_ranges[3] = {     // low, med, high
      {100.0, 150.0}, {200.0, 400.0}, {10000.0, 15000.0}};
  double diff_mix[3] = {0.60, 0.30, 0.10};         // low, med, high
  double c1 = 1.0 / 30.0;  // sampling fraction, group 1
  double c2 = 1.0 / 30.0;  // sampling fraction, group 2
  std::uint64_t seed = 1;  // fixes the per-taxon parameter draws
};

void validate_scenario(const SimScenario& scenario);

SimScenario scenario_from_file(const std::string& path);

struct SimulatedStudy {
  CountMatrix true_counts;
  CountMatrix observed_counts;  // floor(c_i * true), entrywise <= true
  CovariateTable covariates;    // single binary X = group; W empty
  std::vector<char> is_differential;  // per taxon
  std::vector<double> true_effect;    // conditional log-mean difference
  std::vector<double> lambda;         // group-1 Poisson mean per taxon
  std::vector<double> lambda_shift;   // group-2 additive shift (0 if null)
  std::vector<int> shift_class;       // -1 null, 0 low, 1 med, 2 high
};

// The (lambda, shift) draws depend only on scenario.seed so that replicate
// datasets generated with different data_seed values share one parameter
// set. Subject-level draws come from data_seed substreams.
SimulatedStudy generate_benchmark(const SimScenario& scenario,
                                  std::uint64_t data_seed);

// Y = floor(c_i * y) elementwise; c entries must lie in (0,1].
CountMatrix apply_sampling_fraction(const CountMatrix& true_counts,
                                    const std::vector<double>& c);

// E[log Y | Y>0] for Y ~ Poisson(lambda), by series summation (relative
// tolerance well below 1e-10).
double zero_truncated_poisson_log_mean(double lambda);

// Conditional log-mean difference per taxon between the two groups,
// recomputed from the study's stored Poisson parameters.
std::vector<double> true_effects(const SimulatedStudy& study);

// Bounds on var(C*Y) for independent C and Y:
//   lower = var(C)   * (var(Y) + mean(Y)^2)
//   upper = E(C^2)   * (var(Y) + mean(Y)^2)
std::pair<double, double> dispersion_envelope(double c_var, double c_sq_mean,
                                              double y_true_var,
                                              double y_true_mean);

}  // namespace ifaa

#endif  // IFAA_ZILN_SIM_HPP
