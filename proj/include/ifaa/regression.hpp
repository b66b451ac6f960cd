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

#ifndef IFAA_REGRESSION_HPP
#define IFAA_REGRESSION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ifaa/data_model.hpp"
#include "ifaa/matrix.hpp"

namespace ifaa {

// A generic penalized least-squares problem. The intercept column is
// prepended internally and never penalized. Penalized columns are always
// standardized for the solve (coefficients are mapped back to the original
// scale); standardize_mask additionally standardizes unpenalized columns for
// conditioning, which does not change their fitted values.
struct RegressionProblem {
  Matrix design;                       // n x p, without intercept
  std::vector<double> response;        // n
  std::vector<char> penalty_mask;      // p; true = penalized
  std::vector<char> standardize_mask;  // p
  std::uint64_t fold_seed = 0;         // seeds deterministic CV folds

  std::size_t n() const { return response.size(); }
  std::size_t p() const { return penalty_mask.size(); }
};

// Construction helper with the common defaults (all penalized, all
// standardized).
RegressionProblem make_problem(Matrix design, std::vector<double> response);

struct FitDiagnostics {
  std::vector<double> objective_trace;  // penalized objective after each sweep
  int sweeps = 0;
  std::vector<double> lambda_grid;
};

struct SparseFit {
  double intercept = 0.0;
  std::vector<double> coefficients;   // p, original scale; exact zeros
  std::vector<std::size_t> selected;  // penalized indices with nonzero coef
  double lambda = 0.0;                // chosen penalty level
  double objective = 0.0;  // (1/2n)RSS + penalty at the solution
  std::vector<std::string> warnings;  // e.g. dropped degenerate columns
};

struct EstimateWithCI {
  double estimate_intercept = 0.0;
  std::vector<double> estimate;  // p
  std::vector<double> lower;     // p, percentile bootstrap
  std::vector<double> upper;     // p
  double level = 0.0;
  int bootstrap_used = 0;
  int bootstrap_skipped = 0;
};

// Univariate MCP solution for a unit-scale coordinate:
//   sign(z) * max(|z|-lambda, 0) / (1 - 1/gamma)   when |z| <= gamma*lambda
//   z                                              otherwise
double mcp_threshold(double z, double lambda, double gamma);
double soft_threshold(double z, double lambda);

// Cyclic coordinate descent over a log-spaced lambda grid from lambda_max
// down to 0.01*lambda_max; lambda chosen by BIC = n*log(RSS/n) + log(n)*df,
// df = count of nonzero coefficients.
SparseFit fit_mcp_regression(const RegressionProblem& problem, double gamma,
                             int lambda_grid_size,
                             FitDiagnostics* diag = nullptr);

// Same path with soft thresholding; lambda chosen by cv_folds-fold
// cross-validation (minimum mean squared prediction error), folds assigned
// deterministically from problem.fold_seed.
SparseFit fit_lasso(const RegressionProblem& problem, int lambda_grid_size,
                    int cv_folds, FitDiagnostics* diag = nullptr);

// Single fixed-lambda fits (lambda = 0 reproduces least squares for p < n).
SparseFit fit_mcp_at_lambda(const RegressionProblem& problem, double gamma,
                            double lambda, FitDiagnostics* diag = nullptr);
SparseFit fit_lasso_at_lambda(const RegressionProblem& problem, double lambda,
                              FitDiagnostics* diag = nullptr);

struct RidgeRefit {
  double intercept = 0.0;
  std::vector<double> coefficients;  // p
};

// Minimizes RSS + ridge_lambda * sum of squared coefficients over penalized
// columns OUTSIDE `support`; support columns, the intercept and unpenalized
// columns carry no penalty. Solved by the ridge-augmented normal equations.
RidgeRefit partial_ridge_refit(const RegressionProblem& problem,
                               const std::vector<std::size_t>& support,
                               double ridge_lambda);

// Bootstrap Lasso + partial ridge confidence intervals: lasso selects a
// support, partial ridge (ridge_lambda = 1/n) gives the point estimate, and
// paired bootstrap resamples re-run both to yield percentile intervals at
// config.ci_level. Resamples with degenerate response are skipped and
// counted; more than 20% skipped is an error.
EstimateWithCI bootstrap_lpr_ci(const RegressionProblem& problem,
                                const AnalysisConfig& config,
                                std::uint64_t seed, unsigned threads = 1);

}  // namespace ifaa

#endif  // IFAA_REGRESSION_HPP
