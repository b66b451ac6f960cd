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

#include <doctest.h>

#include <cmath>
#include <random>

#include "ifaa/error.hpp"
#include "ifaa/rng.hpp"
#include "ifaa/ziln_sim.hpp"
#include "testutil.hpp"

using namespace ifaa;

namespace {

// Independent oracle for E[log Y | Y>0], Y ~ Poisson(lambda): plain pmf
// recurrence instead of the log-space series used by the library.
double oracle_truncated_log_mean(double lambda) {
  double pmf = lambda * std::exp(-lambda);  // P(Y=1)
  double acc = 0.0;
  long long y = 1;
  while (y < 4 * lambda + 200) {
    acc += pmf * std::log(static_cast<double>(y));
    ++y;
    pmf *= lambda / static_cast<double>(y);
  }
  return acc / (-std::expm1(-lambda));
}

ZilnParams two_taxon_params() {
  ZilnParams p;
  p.mu = {0.0, 0.5};
  p.sigma = Matrix(2, 2);
  p.sigma(0, 0) = 1.0;
  p.sigma(1, 1) = 0.5;
  p.sigma(0, 1) = p.sigma(1, 0) = 0.2;
  p.presence_masses = {{{0}, 0.3}, {{1}, 0.3}, {{0, 1}, 0.4}};
  return p;
}

}  // namespace

TEST_CASE("full-mass pattern gives a plain multivariate log-normal") {
  ZilnParams p = two_taxon_params();
  p.presence_masses = {{{0, 1}, 1.0}};
  CountMatrix m = sample_ziln(p, 200, 42);
  for (double v : m.counts.data()) CHECK(v > 0.0);
}

TEST_CASE("degenerate normal: sigma zero and mu zero give exactly one") {
  ZilnParams p;
  p.mu = {0.0, 0.0, 0.0};
  p.sigma = Matrix(3, 3, 0.0);
  p.presence_masses = {{{0, 1, 2}, 1.0}};
  CountMatrix m = sample_ziln(p, 50, 7);
  for (double v : m.counts.data()) CHECK(v == 1.0);
}

TEST_CASE("empirical presence-pattern frequencies match the masses") {
  ZilnParams p = two_taxon_params();
  const int n = 10000;
  CountMatrix m = sample_ziln(p, n, 20260101);
  int only0 = 0, only1 = 0, both = 0;
  for (int i = 0; i < n; ++i) {
    const bool a = m.counts(i, 0) > 0.0, b = m.counts(i, 1) > 0.0;
    if (a && b)
      ++both;
    else if (a)
      ++only0;
    else if (b)
      ++only1;
  }
  auto within3se = [n](int count, double prob) {
    const double se = std::sqrt(prob * (1 - prob) / n);
    return std::fabs(static_cast<double>(count) / n - prob) <= 3 * se;
  };
  CHECK(within3se(only0, 0.3));
  CHECK(within3se(only1, 0.3));
  CHECK(within3se(both, 0.4));
}

TEST_CASE("ziln parameter validation") {
  ZilnParams p = two_taxon_params();
  p.presence_masses[0].prob = 0.5;  // sums to 1.2
  CHECK_THROWS_AS(validate_params(p), ValidationError);

  p = two_taxon_params();
  p.presence_masses.push_back({{}, 0.0});  // empty pattern
  CHECK_THROWS_AS(validate_params(p), ValidationError);

  p = two_taxon_params();
  p.sigma(0, 1) = 0.9;  // asymmetric
  CHECK_THROWS_AS(validate_params(p), ValidationError);

  p = two_taxon_params();
  p.sigma(0, 1) = p.sigma(1, 0) = 2.0;  // not PSD
  CHECK_THROWS_AS(sample_ziln(p, 5, 1), ValidationError);

  // Factorized form: all-zero probabilities put all mass on the empty set.
  ZilnParams f;
  f.mu = {0.0, 0.0};
  f.sigma = Matrix(2, 2, 0.0);
  f.presence_probs = {0.0, 0.0};
  CHECK_THROWS_AS(validate_params(f), ValidationError);
  f.presence_probs = {0.4, 0.8};
  CountMatrix m = sample_ziln(f, 100, 3);
  for (std::size_t i = 0; i < m.n_samples(); ++i) {
    CHECK((m.counts(i, 0) > 0 || m.counts(i, 1) > 0));
  }
}

TEST_CASE("random intercept cancels in pairwise log-ratios") {
  ZilnParams p = two_taxon_params();
  p.presence_masses = {{{0, 1}, 1.0}};
  CountMatrix base = sample_ziln(p, 100, 99);
  p.random_intercept_sd = 0.8;
  CountMatrix shifted = sample_ziln(p, 100, 99);
  for (std::size_t i = 0; i < 100; ++i) {
    const double r0 = std::log(base.counts(i, 0) / base.counts(i, 1));
    const double r1 = std::log(shifted.counts(i, 0) / shifted.counts(i, 1));
    CHECK(r1 == doctest::Approx(r0).epsilon(1e-12));
    // The intercept itself must be present (counts differ).
    CHECK(shifted.counts(i, 0) != base.counts(i, 0));
  }
}

TEST_CASE("apply_sampling_fraction floors elementwise") {
  CountMatrix m;
  m.sample_ids = {"a", "b", "c"};
  m.taxon_ids = {"t"};
  m.counts = Matrix(3, 1);
  m.counts(0, 0) = 100.0;
  m.counts(1, 0) = 100.0;
  m.counts(2, 0) = 89.0;
  CountMatrix out =
      apply_sampling_fraction(m, {1.0 / 30.0, 1.0, 1.0 / 90.0});
  CHECK(out.counts(0, 0) == 3.0);
  CHECK(out.counts(1, 0) == 100.0);
  CHECK(out.counts(2, 0) == 0.0);

  CHECK_THROWS_AS(apply_sampling_fraction(m, {0.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(apply_sampling_fraction(m, {1.5, 1.0, 1.0}), ValidationError);
}

TEST_CASE("benchmark generator structure at full scale") {
  SimScenario sc;
  sc.n_subjects = 50;
  sc.n_taxa = 500;
  sc.seed = 31;
  validate_scenario(sc);
  SimulatedStudy st = generate_benchmark(sc, 1);

  int n_diff = 0;
  for (char d : st.is_differential) n_diff += d;
  CHECK(n_diff == 125);

  // 10% of taxa drawn from the high-abundance class.
  int n_high = 0;
  for (double l : st.lambda)
    if (l > 5000.0) ++n_high;
  CHECK(n_high == 50);

  // Observed counts never exceed the true counts.
  for (std::size_t i = 0; i < st.true_counts.counts.data().size(); ++i)
    CHECK(st.observed_counts.counts.data()[i] <= st.true_counts.counts.data()[i]);

  // Null taxa carry no shift and no effect.
  for (std::size_t j = 0; j < st.lambda.size(); ++j) {
    if (!st.is_differential[j]) {
      CHECK(st.lambda_shift[j] == 0.0);
      CHECK(st.true_effect[j] == 0.0);
    } else {
      CHECK(st.lambda_shift[j] > 0.0);
      CHECK(st.true_effect[j] > 0.0);
    }
  }
}

TEST_CASE("equal sampling fractions leave group library sizes balanced") {
  SimScenario sc;
  sc.n_subjects = 200;
  sc.n_taxa = 60;
  sc.seed = 5;
  sc.frac_differential = 0.0;  // isolate the sampling-fraction effect
  sc.c1 = sc.c2 = 1.0 / 30.0;
  SimulatedStudy st = generate_benchmark(sc, 9);
  double lib[2] = {0, 0};
  int n[2] = {0, 0};
  for (std::size_t i = 0; i < st.observed_counts.n_samples(); ++i) {
    const int g = st.covariates.x(i, 0) == 1.0 ? 1 : 0;
    for (std::size_t j = 0; j < st.observed_counts.n_taxa(); ++j)
      lib[g] += st.observed_counts.counts(i, j);
    ++n[g];
  }
  const double ratio = (lib[0] / n[0]) / (lib[1] / n[1]);
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("null scenario marks every taxon as null") {
  SimScenario sc;
  sc.n_subjects = 20;
  sc.n_taxa = 30;
  sc.frac_differential = 0.0;
  sc.seed = 8;
  SimulatedStudy st = generate_benchmark(sc, 2);
  for (char d : st.is_differential) CHECK(d == 0);
}

TEST_CASE("replicates share scenario parameters but not data") {
  SimScenario sc;
  sc.n_subjects = 10;
  sc.n_taxa = 20;
  sc.seed = 77;
  SimulatedStudy a = generate_benchmark(sc, 1);
  SimulatedStudy b = generate_benchmark(sc, 2);
  CHECK(a.lambda == b.lambda);
  CHECK(a.lambda_shift == b.lambda_shift);
  CHECK(a.true_counts.counts.data() != b.true_counts.counts.data());

  SimulatedStudy a2 = generate_benchmark(sc, 1);
  CHECK(a.true_counts.counts == a2.true_counts.counts);  // bit-identical
  CHECK(a.observed_counts.counts == a2.observed_counts.counts);
}

TEST_CASE("true_effects matches the independent series oracle") {
  SimulatedStudy st;
  st.lambda = {50.0, 12.0, 50.0};
  st.lambda_shift = {100.0, 5.5, 0.0};
  st.is_differential = {1, 1, 0};
  std::vector<double> eff = true_effects(st);

  // Frozen from the oracle: E[log Y|Y>0] at 150 minus at 50.
  CHECK(eff[0] == doctest::Approx(1.1054332397704307).epsilon(1e-9));
  CHECK(eff[0] ==
        doctest::Approx(oracle_truncated_log_mean(150.0) -
                        oracle_truncated_log_mean(50.0)).epsilon(1e-9));
  CHECK(eff[1] ==
        doctest::Approx(oracle_truncated_log_mean(17.5) -
                        oracle_truncated_log_mean(12.0)).epsilon(1e-9));
  CHECK(eff[2] == 0.0);

  // Small-lambda zero-truncation, frozen from the oracle.
  CHECK(zero_truncated_poisson_log_mean(0.5) ==
        doctest::Approx(0.1751176332496414).epsilon(1e-9));
}

TEST_CASE("full-scale mean true effect is in the generator plausible band") {
  // One fixed parameter draw; the generator's expected mean over the
  // differential taxa is ~1.4 with a seed-to-seed spread of ~0.15.
  SimScenario sc;
  sc.n_subjects = 50;
  sc.n_taxa = 500;
  sc.seed = 4;
  SimulatedStudy st = generate_benchmark(sc, 1);
  double mean = 0.0;
  int n = 0;
  for (std::size_t j = 0; j < st.lambda.size(); ++j)
    if (st.is_differential[j]) {
      mean += st.true_effect[j];
      ++n;
    }
  mean /= n;
  CHECK(mean > 1.0);
  CHECK(mean < 2.0);
}

TEST_CASE("dispersion envelope formula and bounds") {
  auto [lo, hi] = dispersion_envelope(0.01, 0.02, 4.0, 10.0);
  CHECK(lo == doctest::Approx(1.04).epsilon(1e-12));
  CHECK(hi == doctest::Approx(2.08).epsilon(1e-12));

  auto [lo0, hi0] = dispersion_envelope(0.0, 0.04, 4.0, 10.0);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(0.04 * 104.0));

  CHECK_THROWS_AS(dispersion_envelope(-0.1, 0.2, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(dispersion_envelope(0.3, 0.2, 1.0, 1.0), ValidationError);
}

TEST_CASE("Monte Carlo variance of C*Y lies in the envelope") {
  // C ~ Uniform(0.1, 0.3) independent of Y ~ Poisson(50).
  Rng rng(123);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = rng.uniform(0.1, 0.3);
    const double y = c * static_cast<double>(rng.poisson(50.0));
    s1 += y;
    s2 += y * y;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  const double c_mean = 0.2;
  const double c_var = 0.2 * 0.2 / 12.0;
  auto [lo, hi] = dispersion_envelope(c_var, c_var + c_mean * c_mean, 50.0, 50.0);
  CHECK(var >= lo * 0.97);
  CHECK(var <= hi * 1.03);
}

TEST_CASE("scenario file parsing and validation") {
  test::TempDir dir("scn");
  test::write_file(dir.file("s.scn"),
                   "n_subjects = 10\n"
                   "n_taxa = 6\n"
                   "frac_differential = 0.5\n"
                   "gamma_shapes = 50, 200, 10000\n"
                   "c1 = 0.5\nc2 = 0.25\nseed = 3\n");
  SimScenario sc = scenario_from_file(dir.file("s.scn"));
  CHECK(sc.n_subjects == 10);
  CHECK(sc.n_taxa == 6);
  CHECK(sc.c2 == 0.25);

  test::write_file(dir.file("bad.scn"), "n_taxa = 6\nc1 = 0\n");
  CHECK_THROWS_WITH_AS(scenario_from_file(dir.file("bad.scn")),
                       doctest::Contains("c1"), ValidationError);
}
