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
#include "ifaa/regression.hpp"

using namespace ifaa;

namespace {

// Dense least-squares oracle, independent of the engine: normal equations
// solved by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a(ri, c) * x[c];
    x[ri] = s / a(ri, ri);
  }
  return x;
}

// OLS of y on [1 | design], returning (intercept, coefficients).
std::pair<double, std::vector<double>> ols_oracle(const Matrix& design,
                                                  const std::vector<double>& y,
                                                  double ridge = 0.0,
                                                  const std::vector<char>* penal = nullptr,
                                                  const std::vector<char>* in_support = nullptr) {
  const std::size_t n = design.rows(), p = design.cols();
  Matrix a(p + 1, p + 1);
  std::vector<double> b(p + 1, 0.0);
  a(0, 0) = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[0] += y[i];
    for (std::size_t j = 0; j < p; ++j) {
      a(0, j + 1) += design(i, j);
      b[j + 1] += design(i, j) * y[i];
      for (std::size_t l = 0; l <= j; ++l)
        a(j + 1, l + 1) += design(i, j) * design(i, l);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    a(j + 1, 0) = a(0, j + 1);
    for (std::size_t l = j + 1; l < p; ++l) a(j + 1, l + 1) = a(l + 1, j + 1);
    if (ridge > 0.0 && penal && (*penal)[j] && !(in_support && (*in_support)[j]))
      a(j + 1, j + 1) += ridge;
  }
  std::vector<double> sol = solve_dense(std::move(a), std::move(b));
  return {sol[0], std::vector<double>(sol.begin() + 1, sol.end())};
}

RegressionProblem random_problem(std::size_t n, std::size_t p,
                                 const std::vector<double>& beta, double sigma,
                                 unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  RegressionProblem prob;
  prob.design = Matrix(n, p);
  prob.response.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0.5;  // intercept
    for (std::size_t j = 0; j < p; ++j) {
      prob.design(i, j) = nd(gen);
      y += beta[j] * prob.design(i, j);
    }
    prob.response[i] = y + sigma * nd(gen);
  }
  prob.penalty_mask.assign(p, 1);
  prob.standardize_mask.assign(p, 1);
  prob.fold_seed = seed;
  return prob;
}

}  // namespace

TEST_CASE("mcp_threshold regions") {
  CHECK(mcp_threshold(0.5, 1.0, 3.0) == 0.0);
  CHECK(mcp_threshold(5.0, 1.0, 3.0) == 5.0);
  CHECK(mcp_threshold(2.0, 1.0, 3.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(mcp_threshold(-2.0, 1.0, 3.0) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK_THROWS_AS(mcp_threshold(1.0, 1.0, 1.0), ValidationError);

  // MCP approaches soft thresholding as gamma grows.
  for (double z : {-3.0, 0.5, 3.0}) {
    CHECK(std::fabs(mcp_threshold(z, 1.0, 1e9) - soft_threshold(z, 1.0)) <
          1e-6);
  }
}

TEST_CASE("lambda zero reproduces the dense least-squares oracle") {
  std::vector<double> beta = {2.0, -1.0, 0.0, 0.5, 3.0, 0.0, -0.25, 1.0};
  RegressionProblem prob = random_problem(60, 8, beta, 0.3, 11);
  SparseFit fit = fit_mcp_at_lambda(prob, 3.0, 0.0);
  auto [b0, coef] = ols_oracle(prob.design, prob.response);
  CHECK(fit.intercept == doctest::Approx(b0).epsilon(1e-6));
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(fit.coefficients[j] == doctest::Approx(coef[j]).epsilon(1e-6));

  SparseFit lfit = fit_lasso_at_lambda(prob, 0.0);
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(lfit.coefficients[j] == doctest::Approx(coef[j]).epsilon(1e-6));
}

TEST_CASE("orthonormal design: lasso equals soft-thresholded least squares") {
  // Columns with mean 0, variance 1, exactly orthogonal: Helmert-style
  // contrasts over n = 8 rows, scaled to unit population variance.
  const std::size_t n = 8;
  Matrix design(n, 3);
  const double rows[3][8] = {
      {1, -1, 1, -1, 1, -1, 1, -1},
      {1, 1, -1, -1, 1, 1, -1, -1},
      {1, 1, 1, 1, -1, -1, -1, -1},
  };
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < n; ++i) design(i, j) = rows[j][i];

  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  std::vector<double> y(n);
  for (auto& v : y) v = nd(gen);

  RegressionProblem prob;
  prob.design = design;
  prob.response = y;
  prob.penalty_mask.assign(3, 1);
  prob.standardize_mask.assign(3, 1);

  const double lambda = 0.15;
  SparseFit fit = fit_lasso_at_lambda(prob, lambda);
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= n;
  for (std::size_t j = 0; j < 3; ++j) {
    double corr = 0.0;
    for (std::size_t i = 0; i < n; ++i) corr += design(i, j) * (y[i] - mean_y);
    corr /= n;
    CHECK(fit.coefficients[j] ==
          doctest::Approx(soft_threshold(corr, lambda)).epsilon(1e-8));
  }
}

TEST_CASE("all-zero response gives the zero fit") {
  RegressionProblem prob = random_problem(40, 4, {0, 0, 0, 0}, 0.0, 5);
  std::fill(prob.response.begin(), prob.response.end(), 0.0);
  SparseFit fit = fit_mcp_regression(prob, 3.0, 30);
  CHECK(fit.selected.empty());
  for (double c : fit.coefficients) CHECK(c == 0.0);
  CHECK(fit.intercept == 0.0);
}

TEST_CASE("pure-noise responses rarely select anything") {
  // With BIC = n log(RSS/n) + log(n) df, a null coefficient enters when its
  // squared t-statistic exceeds log(n); for n=200, p=10 that leaves an
  // empty model in roughly four fits out of five.
  int empty = 0;
  const int reps = 60;
  for (int r = 0; r < reps; ++r) {
    RegressionProblem prob =
        random_problem(200, 10, std::vector<double>(10, 0.0), 1.0, 1000 + r);
    std::mt19937_64 gen(5000 + r);
    std::normal_distribution<double> nd;
    for (auto& y : prob.response) y = nd(gen);
    SparseFit fit = fit_mcp_regression(prob, 3.0, 40);
    if (fit.selected.empty()) ++empty;
  }
  CHECK(empty >= static_cast<int>(0.70 * reps));
}

TEST_CASE("a single strong predictor is found with an accurate coefficient") {
  int hits = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    RegressionProblem prob =
        random_problem(100, 6, {5.0, 0, 0, 0, 0, 0}, 0.1, 300 + r);
    SparseFit fit = fit_mcp_regression(prob, 3.0, 40);
    if (fit.selected == std::vector<std::size_t>{0} &&
        std::fabs(fit.coefficients[0] - 5.0) < 0.25)
      ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("penalized coefficients are exactly zero or clearly nonzero") {
  for (int r = 0; r < 10; ++r) {
    RegressionProblem prob =
        random_problem(50, 8, {1.5, 0, 0, 0.8, 0, 0, 0, 0}, 1.0, 40 + r);
    SparseFit fit = fit_mcp_regression(prob, 3.0, 30);
    for (std::size_t j = 0; j < 8; ++j) {
      const double c = std::fabs(fit.coefficients[j]);
      CHECK((c == 0.0 || c > 1e-12));
    }
  }
}

TEST_CASE("coordinate descent objective is non-increasing") {
  RegressionProblem prob =
      random_problem(80, 6, {1.0, -2.0, 0, 0, 0.5, 0}, 1.0, 17);
  for (double lambda : {0.02, 0.1, 0.4}) {
    FitDiagnostics diag;
    fit_mcp_at_lambda(prob, 3.0, lambda, &diag);
    REQUIRE(!diag.objective_trace.empty());
    for (std::size_t s = 1; s < diag.objective_trace.size(); ++s)
      CHECK(diag.objective_trace[s] <=
            diag.objective_trace[s - 1] +
                1e-10 * (1.0 + std::fabs(diag.objective_trace[s - 1])));
    FitDiagnostics ldiag;
    fit_lasso_at_lambda(prob, lambda, &ldiag);
    for (std::size_t s = 1; s < ldiag.objective_trace.size(); ++s)
      CHECK(ldiag.objective_trace[s] <=
            ldiag.objective_trace[s - 1] +
                1e-10 * (1.0 + std::fabs(ldiag.objective_trace[s - 1])));
  }
}

TEST_CASE("MCP with huge gamma matches lasso along the same lambda") {
  RegressionProblem prob =
      random_problem(60, 5, {1.2, 0, -0.7, 0, 0.3}, 0.8, 23);
  for (double lambda : {0.05, 0.2, 0.5}) {
    SparseFit m = fit_mcp_at_lambda(prob, 1e9, lambda);
    SparseFit l = fit_lasso_at_lambda(prob, lambda);
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(std::fabs(m.coefficients[j] - l.coefficients[j]) < 1e-6);
  }
}

TEST_CASE("column permutation permutes coefficients identically") {
  RegressionProblem prob =
      random_problem(70, 4, {2.0, -1.0, 0.0, 0.5}, 0.5, 31);
  SparseFit base = fit_mcp_regression(prob, 3.0, 30);

  // Swap columns 0 and 2.
  RegressionProblem swapped = prob;
  for (std::size_t i = 0; i < prob.n(); ++i)
    std::swap(swapped.design(i, 0), swapped.design(i, 2));
  SparseFit fit = fit_mcp_regression(swapped, 3.0, 30);
  CHECK(fit.coefficients[2] == doctest::Approx(base.coefficients[0]).epsilon(1e-10));
  CHECK(fit.coefficients[0] == doctest::Approx(base.coefficients[2]).epsilon(1e-10));
  CHECK(fit.coefficients[1] == doctest::Approx(base.coefficients[1]).epsilon(1e-10));
}

TEST_CASE("negating a column negates its coefficient only") {
  RegressionProblem prob =
      random_problem(70, 4, {2.0, -1.0, 0.3, 0.5}, 0.5, 37);
  SparseFit base = fit_mcp_regression(prob, 3.0, 30);
  RegressionProblem neg = prob;
  for (std::size_t i = 0; i < prob.n(); ++i) neg.design(i, 1) = -neg.design(i, 1);
  SparseFit fit = fit_mcp_regression(neg, 3.0, 30);
  CHECK(fit.coefficients[1] == doctest::Approx(-base.coefficients[1]).epsilon(1e-10));
  CHECK(fit.coefficients[0] == doctest::Approx(base.coefficients[0]).epsilon(1e-10));
  CHECK(fit.selected.size() == base.selected.size());
}

TEST_CASE("standardization round-trip: fitted values agree on both scales") {
  // The same rows expressed in wildly different column units must produce
  // identical predictions.
  RegressionProblem prob =
      random_problem(50, 3, {1.0, -0.5, 0.25}, 0.4, 41);
  RegressionProblem scaled = prob;
  const double units[3] = {1000.0, 0.001, 37.5};
  for (std::size_t i = 0; i < prob.n(); ++i)
    for (std::size_t j = 0; j < 3; ++j) scaled.design(i, j) *= units[j];

  SparseFit a = fit_mcp_at_lambda(prob, 3.0, 0.05);
  SparseFit b = fit_mcp_at_lambda(scaled, 3.0, 0.05);
  for (std::size_t i = 0; i < prob.n(); ++i) {
    double pa = a.intercept, pb = b.intercept;
    for (std::size_t j = 0; j < 3; ++j) {
      pa += a.coefficients[j] * prob.design(i, j);
      pb += b.coefficients[j] * scaled.design(i, j);
    }
    CHECK(pa == doctest::Approx(pb).epsilon(1e-8));
  }
}

TEST_CASE("degenerate penalized column is dropped with a warning") {
  RegressionProblem prob = random_problem(30, 3, {1.0, 0, 0}, 0.3, 47);
  for (std::size_t i = 0; i < prob.n(); ++i) prob.design(i, 2) = 4.2;
  SparseFit fit = fit_mcp_regression(prob, 3.0, 20);
  CHECK(fit.coefficients[2] == 0.0);
  REQUIRE(!fit.warnings.empty());
  CHECK(fit.warnings[0].find("zero variance") != std::string::npos);
}

TEST_CASE("partial ridge refit limits and oracle") {
  std::vector<double> beta = {2.0, 0.0, 0.0, 1.0, 0.0};
  RegressionProblem prob = random_problem(50, 5, beta, 0.4, 53);

  SUBCASE("support covering all penalized columns equals plain OLS") {
    RidgeRefit rr = partial_ridge_refit(prob, {0, 1, 2, 3, 4}, 123.0);
    auto [b0, coef] = ols_oracle(prob.design, prob.response);
    CHECK(rr.intercept == doctest::Approx(b0).epsilon(1e-9));
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(rr.coefficients[j] == doctest::Approx(coef[j]).epsilon(1e-9));
  }

  SUBCASE("huge ridge with empty support zeroes the penalized block") {
    RidgeRefit rr = partial_ridge_refit(prob, {}, 1e12);
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(std::fabs(rr.coefficients[j]) < 1e-6);
    double mean_y = 0.0;
    for (double v : prob.response) mean_y += v;
    CHECK(rr.intercept == doctest::Approx(mean_y / prob.n()).epsilon(1e-6));
  }

  SUBCASE("matches the ridge-augmented normal-equation oracle") {
    std::vector<char> penal(5, 1), support(5, 0);
    support[0] = support[3] = 1;
    const double ridge = 1.0 / prob.n();
    RidgeRefit rr = partial_ridge_refit(prob, {0, 3}, ridge);
    auto [b0, coef] = ols_oracle(prob.design, prob.response, ridge, &penal, &support);
    CHECK(rr.intercept == doctest::Approx(b0).epsilon(1e-9));
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(rr.coefficients[j] == doctest::Approx(coef[j]).epsilon(1e-9));
  }

  SUBCASE("support must index penalized columns") {
    RegressionProblem mixed = prob;
    mixed.penalty_mask[1] = 0;
    CHECK_THROWS_AS(partial_ridge_refit(mixed, {1}, 0.1), ValidationError);
  }
}

TEST_CASE("bootstrap on noiseless data returns the truth with zero width") {
  RegressionProblem prob = random_problem(50, 3, {1.5, 0.0, -2.0}, 0.0, 59);
  AnalysisConfig cfg;
  cfg.bootstrap_reps = 60;
  EstimateWithCI est = bootstrap_lpr_ci(prob, cfg, 71);
  CHECK(est.estimate[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(est.estimate[2] == doctest::Approx(-2.0).epsilon(1e-6));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(est.upper[j] - est.lower[j] >= -1e-12);
    CHECK(est.upper[j] - est.lower[j] < 1e-6);
  }
  CHECK(est.bootstrap_skipped == 0);
}

TEST_CASE("bootstrap interval endpoints mirror under column negation") {
  RegressionProblem prob = random_problem(80, 2, {1.0, 0.4}, 0.7, 61);
  AnalysisConfig cfg;
  cfg.bootstrap_reps = 80;
  EstimateWithCI base = bootstrap_lpr_ci(prob, cfg, 5);

  RegressionProblem neg = prob;
  for (std::size_t i = 0; i < prob.n(); ++i) neg.design(i, 0) = -neg.design(i, 0);
  EstimateWithCI mirrored = bootstrap_lpr_ci(neg, cfg, 5);
  CHECK(mirrored.estimate[0] == doctest::Approx(-base.estimate[0]).epsilon(1e-9));
  CHECK(mirrored.lower[0] == doctest::Approx(-base.upper[0]).epsilon(1e-9));
  CHECK(mirrored.upper[0] == doctest::Approx(-base.lower[0]).epsilon(1e-9));
  CHECK(mirrored.estimate[1] == doctest::Approx(base.estimate[1]).epsilon(1e-9));
}

TEST_CASE("bootstrap is independent of the thread count") {
  RegressionProblem prob = random_problem(60, 3, {1.0, 0, 0.5}, 0.5, 67);
  AnalysisConfig cfg;
  cfg.bootstrap_reps = 50;
  EstimateWithCI a = bootstrap_lpr_ci(prob, cfg, 9, 1);
  EstimateWithCI b = bootstrap_lpr_ci(prob, cfg, 9, 4);
  CHECK(a.estimate == b.estimate);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
}

TEST_CASE("quick planted-coefficient coverage sanity") {
  // The full 100-replicate coverage check runs in the acceptance suite.
  int covered = 0;
  const int reps = 25;
  AnalysisConfig cfg;
  cfg.bootstrap_reps = 120;
  cfg.ci_level = 0.95;
  for (int r = 0; r < reps; ++r) {
    RegressionProblem prob =
        random_problem(150, 4, {1.0, 0, 0, 0}, 1.0, 900 + r);
    EstimateWithCI est = bootstrap_lpr_ci(prob, cfg, 900 + r);
    if (est.lower[0] <= 1.0 && 1.0 <= est.upper[0]) ++covered;
  }
  CHECK(covered >= 20);
}

TEST_CASE("problem validation rejects malformed input") {
  RegressionProblem prob = random_problem(10, 2, {1.0, 0.0}, 0.1, 73);
  prob.response[3] = std::nan("");
  CHECK_THROWS_AS(fit_mcp_regression(prob, 3.0, 20), ValidationError);

  RegressionProblem empty;
  CHECK_THROWS_AS(fit_mcp_regression(empty, 3.0, 20), ValidationError);
}
