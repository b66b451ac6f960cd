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

#include "ifaa/regression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ifaa/error.hpp"
#include "ifaa/kernels.hpp"
#include "ifaa/parallel.hpp"
#include "ifaa/rng.hpp"

namespace ifaa {

namespace {

constexpr double kCoefTol = 1e-7;   // max coefficient change per sweep
constexpr int kMaxSweeps = 10000;
constexpr double kGridFloor = 0.01;  // grid spans [0.01*lambda_max, lambda_max]
constexpr double kZeroSnap = 1e-12;
constexpr double kHugeLambda = 1e300;  // freezes penalized coords at zero
constexpr int kBootstrapCvFolds = 5;

enum class Penalty { lasso, mcp };

// Standardized view of a problem plus the sufficient statistics the
// coordinate updates run on (covariance updating: everything is O(k) per
// coordinate once the Gram matrix is in place).
struct Prep {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::size_t> kept;     // original indices of active columns
  std::vector<char> kept_penalized;  // parallel to kept
  Matrix cols;                       // kept.size() rows of length n
  std::vector<double> center;        // per original column
  std::vector<double> scale;         // per original column, 1 if unscaled
  double y_mean = 0.0;
  std::vector<double> yc;  // centered response
  double y2n = 0.0;        // sumsq(yc)/n
  Matrix gram;             // k x k
  std::vector<double> corr;  // k, <col_a, yc>/n
  std::size_t unpenalized_kept = 0;
  std::vector<std::string> warnings;

  bool response_degenerate() const {
    return std::sqrt(y2n) <= 1e-12 * (1.0 + std::fabs(y_mean));
  }
};

void validate_problem(const RegressionProblem& prob) {
  const std::size_t n = prob.n();
  const std::size_t p = prob.p();
  if (n < 1) throw ValidationError("regression: empty response");
  if (p < 1) throw ValidationError("regression: no covariate columns");
  if (prob.design.rows() != n || prob.design.cols() != p)
    throw ValidationError("regression: design shape mismatch");
  if (prob.standardize_mask.size() != p)
    throw ValidationError("regression: standardize_mask length mismatch");
  for (double v : prob.design.data())
    if (!std::isfinite(v))
      throw ValidationError("regression: non-finite design entry");
  for (double v : prob.response)
    if (!std::isfinite(v))
      throw ValidationError("regression: non-finite response entry");
}

Prep preprocess(const RegressionProblem& prob) {
  validate_problem(prob);
  Prep pp;
  pp.n = prob.n();
  pp.p = prob.p();
  const double inv_n = 1.0 / static_cast<double>(pp.n);

  pp.y_mean = kern::sum(prob.response.data(), pp.n) * inv_n;
  pp.yc.resize(pp.n);
  for (std::size_t i = 0; i < pp.n; ++i) pp.yc[i] = prob.response[i] - pp.y_mean;
  pp.y2n = kern::sumsq(pp.yc.data(), pp.n) * inv_n;

  pp.center.assign(pp.p, 0.0);
  pp.scale.assign(pp.p, 1.0);

  std::vector<std::vector<double>> active;
  std::vector<double> col(pp.n);
  for (std::size_t j = 0; j < pp.p; ++j) {
    for (std::size_t i = 0; i < pp.n; ++i) col[i] = prob.design(i, j);
    const double mean = kern::sum(col.data(), pp.n) * inv_n;
    for (std::size_t i = 0; i < pp.n; ++i) col[i] -= mean;
    const double sd = std::sqrt(std::max(0.0, kern::sumsq(col.data(), pp.n) * inv_n));
    pp.center[j] = mean;

    if (sd <= 1e-12 * (1.0 + std::fabs(mean))) {
      pp.warnings.push_back("design column " + std::to_string(j) +
                            " has zero variance; dropped from fit");
      continue;
    }
    const bool penalized = prob.penalty_mask[j] != 0;
    if (penalized || prob.standardize_mask[j]) {
      pp.scale[j] = sd;
      kern::scale(1.0 / sd, col.data(), pp.n);
    }
    pp.kept.push_back(j);
    pp.kept_penalized.push_back(penalized ? 1 : 0);
    if (!penalized) ++pp.unpenalized_kept;
    active.push_back(col);
  }

  const std::size_t k = pp.kept.size();
  pp.cols = Matrix(k, pp.n);
  for (std::size_t a = 0; a < k; ++a)
    std::copy(active[a].begin(), active[a].end(), pp.cols.row(a));

  pp.gram = Matrix(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double g = kern::dot(pp.cols.row(a), pp.cols.row(b), pp.n) * inv_n;
      pp.gram(a, b) = g;
      pp.gram(b, a) = g;
    }
  }
  pp.corr.resize(k);
  for (std::size_t a = 0; a < k; ++a)
    pp.corr[a] = kern::dot(pp.cols.row(a), pp.yc.data(), pp.n) * inv_n;

  return pp;
}

// Univariate MCP minimizer for a coordinate with curvature v.
double mcp_update(double z, double lambda, double gamma, double v) {
  const double az = std::fabs(z);
  if (az <= lambda) return 0.0;
  if (az <= gamma * lambda * v)
    return std::copysign((az - lambda) / (v - 1.0 / gamma), z);
  return z / v;
}

double mcp_rho(double t, double lambda, double gamma) {
  const double at = std::fabs(t);
  if (at <= gamma * lambda) return lambda * at - t * t / (2.0 * gamma);
  return 0.5 * gamma * lambda * lambda;
}

double penalized_objective(const Prep& pp, Penalty pen, double gamma,
                           double lambda, const std::vector<double>& beta,
                           const std::vector<double>& gb) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t a = 0; a < beta.size(); ++a) {
    lin += beta[a] * pp.corr[a];
    quad += beta[a] * gb[a];
  }
  double rss_n = pp.y2n - 2.0 * lin + quad;
  if (rss_n < 0.0) rss_n = 0.0;
  double obj = 0.5 * rss_n;
  for (std::size_t a = 0; a < beta.size(); ++a) {
    if (!pp.kept_penalized[a]) continue;
    obj += pen == Penalty::lasso ? lambda * std::fabs(beta[a])
                                 : mcp_rho(beta[a], lambda, gamma);
  }
  return obj;
}

double rss_of(const Prep& pp, const std::vector<double>& beta,
              const std::vector<double>& gb) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t a = 0; a < beta.size(); ++a) {
    lin += beta[a] * pp.corr[a];
    quad += beta[a] * gb[a];
  }
  double rss = static_cast<double>(pp.n) * (pp.y2n - 2.0 * lin + quad);
  return std::max(rss, 0.0);
}

int cd_solve(const Prep& pp, Penalty pen, double gamma, double lambda,
             std::vector<double>& beta, std::vector<double>& gb,
             std::vector<double>* trace = nullptr) {
  const std::size_t k = pp.kept.size();
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double vaa = pp.gram(a, a);
      const double z = pp.corr[a] - gb[a] + vaa * beta[a];
      double nb;
      if (!pp.kept_penalized[a])
        nb = z / vaa;
      else if (pen == Penalty::lasso)
        nb = soft_threshold(z, lambda) / vaa;
      else
        nb = mcp_update(z, lambda, gamma, vaa);
      const double delta = nb - beta[a];
      if (delta != 0.0) {
        beta[a] = nb;
        kern::axpy(delta, pp.gram.row(a), gb.data(), k);
        const double ad = std::fabs(delta);
        if (ad > max_delta) max_delta = ad;
      }
    }
    if (trace)
      trace->push_back(penalized_objective(pp, pen, gamma, lambda, beta, gb));
    if (max_delta < kCoefTol) return sweep;
  }
  return kMaxSweeps;
}

void recompute_gb(const Prep& pp, const std::vector<double>& beta,
                  std::vector<double>& gb) {
  const std::size_t k = beta.size();
  gb.assign(k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    if (beta[a] != 0.0) kern::axpy(beta[a], pp.gram.row(a), gb.data(), k);
}

void to_original(const Prep& pp, const std::vector<double>& beta,
                 double* intercept, std::vector<double>& coef) {
  coef.assign(pp.p, 0.0);
  double shift = 0.0;
  for (std::size_t a = 0; a < pp.kept.size(); ++a) {
    const std::size_t j = pp.kept[a];
    coef[j] = beta[a] / pp.scale[j];
    shift += coef[j] * pp.center[j];
  }
  *intercept = pp.y_mean - shift;
}

SparseFit finalize(const RegressionProblem& prob, const Prep& pp,
                   std::vector<double> beta, Penalty pen, double gamma,
                   double lambda) {
  // Enforce exact zeros on penalized coordinates before reporting.
  for (std::size_t a = 0; a < beta.size(); ++a)
    if (pp.kept_penalized[a] && std::fabs(beta[a]) < kZeroSnap) beta[a] = 0.0;

  std::vector<double> gb;
  recompute_gb(pp, beta, gb);

  SparseFit fit;
  fit.lambda = lambda;
  fit.objective = penalized_objective(pp, pen, gamma, lambda, beta, gb);
  to_original(pp, beta, &fit.intercept, fit.coefficients);
  for (std::size_t a = 0; a < beta.size(); ++a)
    if (pp.kept_penalized[a] && beta[a] != 0.0)
      fit.selected.push_back(pp.kept[a]);
  fit.warnings = pp.warnings;
  (void)prob;
  return fit;
}

// Fits the unpenalized block only (huge lambda pins penalized coordinates at
// zero) and returns lambda_max, the smallest lambda with an all-zero
// penalized block.
double solve_null_model(const Prep& pp, std::vector<double>& beta,
                        std::vector<double>& gb) {
  if (pp.unpenalized_kept > 0)
    cd_solve(pp, Penalty::lasso, 3.0, kHugeLambda, beta, gb);
  double lambda_max = 0.0;
  for (std::size_t a = 0; a < pp.kept.size(); ++a)
    if (pp.kept_penalized[a])
      lambda_max = std::max(lambda_max, std::fabs(pp.corr[a] - gb[a]));
  return lambda_max;
}

std::vector<double> lambda_grid(double lambda_max, int size) {
  std::vector<double> grid(size);
  for (int i = 0; i < size; ++i)
    grid[i] = lambda_max * std::pow(kGridFloor,
                                    static_cast<double>(i) / (size - 1));
  return grid;
}

bool signal_below_noise(const Prep& pp, double lambda_max) {
  return lambda_max <= 1e-10 * std::max(std::sqrt(pp.y2n), 1e-300);
}

void check_path_pre(const RegressionProblem& prob, const Prep& pp) {
  if (prob.n() <= pp.unpenalized_kept)
    throw ValidationError(
        "regression: need more observations than unpenalized columns");
}

}  // namespace

RegressionProblem make_problem(Matrix design, std::vector<double> response) {
  RegressionProblem prob;
  prob.penalty_mask.assign(design.cols(), 1);
  prob.standardize_mask.assign(design.cols(), 1);
  prob.design = std::move(design);
  prob.response = std::move(response);
  return prob;
}

double soft_threshold(double z, double lambda) {
  const double az = std::fabs(z);
  if (az <= lambda) return 0.0;
  return std::copysign(az - lambda, z);
}

double mcp_threshold(double z, double lambda, double gamma) {
  if (!(gamma > 1.0)) throw ValidationError("mcp_threshold: gamma must be > 1");
  if (lambda < 0.0) throw ValidationError("mcp_threshold: negative lambda");
  return mcp_update(z, lambda, gamma, 1.0);
}

SparseFit fit_mcp_regression(const RegressionProblem& prob, double gamma,
                             int lambda_grid_size, FitDiagnostics* diag) {
  if (!(gamma > 1.0)) throw ValidationError("fit_mcp_regression: gamma must be > 1");
  if (lambda_grid_size < 2)
    throw ValidationError("fit_mcp_regression: grid size must be >= 2");
  Prep pp = preprocess(prob);
  check_path_pre(prob, pp);

  std::vector<double> beta(pp.kept.size(), 0.0), gb(pp.kept.size(), 0.0);
  if (pp.response_degenerate())
    return finalize(prob, pp, beta, Penalty::mcp, gamma, 0.0);

  const double lambda_max = solve_null_model(pp, beta, gb);
  if (signal_below_noise(pp, lambda_max))
    return finalize(prob, pp, beta, Penalty::mcp, gamma, lambda_max);

  const std::vector<double> grid = lambda_grid(lambda_max, lambda_grid_size);
  if (diag) diag->lambda_grid = grid;
  const double logn = std::log(static_cast<double>(pp.n));

  double best_bic = 0.0;
  double best_lambda = grid.front();
  std::vector<double> best_beta = beta;
  bool have_best = false;
  int total_sweeps = 0;
  for (double lam : grid) {
    total_sweeps += cd_solve(pp, Penalty::mcp, gamma, lam, beta, gb);
    const double rss = std::max(rss_of(pp, beta, gb), 1e-300);
    int df = 1;  // intercept
    for (double b : beta)
      if (b != 0.0) ++df;
    const double bic = pp.n * std::log(rss / pp.n) + logn * df;
    if (!have_best || bic < best_bic) {
      have_best = true;
      best_bic = bic;
      best_lambda = lam;
      best_beta = beta;
    }
  }
  if (diag) diag->sweeps = total_sweeps;
  return finalize(prob, pp, best_beta, Penalty::mcp, gamma, best_lambda);
}

SparseFit fit_lasso(const RegressionProblem& prob, int lambda_grid_size,
                    int cv_folds, FitDiagnostics* diag) {
  if (lambda_grid_size < 2)
    throw ValidationError("fit_lasso: grid size must be >= 2");
  if (cv_folds < 2) throw ValidationError("fit_lasso: cv_folds must be >= 2");
  Prep pp = preprocess(prob);
  check_path_pre(prob, pp);

  std::vector<double> beta(pp.kept.size(), 0.0), gb(pp.kept.size(), 0.0);
  if (pp.response_degenerate())
    return finalize(prob, pp, beta, Penalty::lasso, 0.0, 0.0);

  const double lambda_max = solve_null_model(pp, beta, gb);
  if (signal_below_noise(pp, lambda_max))
    return finalize(prob, pp, beta, Penalty::lasso, 0.0, lambda_max);

  const std::vector<double> grid = lambda_grid(lambda_max, lambda_grid_size);
  if (diag) diag->lambda_grid = grid;

  const std::size_t n = pp.n;
  const std::size_t folds = std::min<std::size_t>(cv_folds, n);
  std::size_t best_index = grid.size() - 1;
  if (folds >= 2) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng frng(mix_seed(prob.fold_seed, {kStreamFolds}));
    frng.shuffle(perm);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i % folds;

    std::vector<double> sq_err(grid.size(), 0.0);
    std::vector<double> coef;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train, val;
      for (std::size_t i = 0; i < n; ++i)
        (fold_of[i] == f ? val : train).push_back(i);
      if (train.empty() || val.empty()) continue;

      RegressionProblem sub;
      sub.design = Matrix(train.size(), prob.p());
      sub.response.resize(train.size());
      for (std::size_t r = 0; r < train.size(); ++r) {
        std::copy(prob.design.row(train[r]),
                  prob.design.row(train[r]) + prob.p(), sub.design.row(r));
        sub.response[r] = prob.response[train[r]];
      }
      sub.penalty_mask = prob.penalty_mask;
      sub.standardize_mask = prob.standardize_mask;

      Prep tp = preprocess(sub);
      std::vector<double> tbeta(tp.kept.size(), 0.0), tgb(tp.kept.size(), 0.0);
      if (!tp.response_degenerate()) solve_null_model(tp, tbeta, tgb);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!tp.response_degenerate())
          cd_solve(tp, Penalty::lasso, 3.0, grid[g], tbeta, tgb);
        double intercept;
        to_original(tp, tbeta, &intercept, coef);
        for (std::size_t v : val) {
          const double pred =
              intercept + kern::dot(prob.design.row(v), coef.data(), prob.p());
          const double e = prob.response[v] - pred;
          sq_err[g] += e * e;
        }
      }
    }
    best_index = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
      if (sq_err[g] < sq_err[best_index]) best_index = g;
  }

  // Refit on the full data, warm-started along the grid prefix.
  std::fill(beta.begin(), beta.end(), 0.0);
  std::fill(gb.begin(), gb.end(), 0.0);
  solve_null_model(pp, beta, gb);
  int total_sweeps = 0;
  for (std::size_t g = 0; g <= best_index; ++g)
    total_sweeps += cd_solve(pp, Penalty::lasso, 3.0, grid[g], beta, gb);
  if (diag) diag->sweeps = total_sweeps;
  return finalize(prob, pp, beta, Penalty::lasso, 3.0, grid[best_index]);
}

namespace {

SparseFit fit_at_lambda(const RegressionProblem& prob, Penalty pen,
                        double gamma, double lambda, FitDiagnostics* diag) {
  if (lambda < 0.0) throw ValidationError("fit: negative lambda");
  Prep pp = preprocess(prob);
  check_path_pre(prob, pp);
  std::vector<double> beta(pp.kept.size(), 0.0), gb(pp.kept.size(), 0.0);
  if (pp.response_degenerate())
    return finalize(prob, pp, beta, pen, gamma, lambda);
  std::vector<double>* trace = diag ? &diag->objective_trace : nullptr;
  int sweeps = cd_solve(pp, pen, gamma, lambda, beta, gb, trace);
  if (diag) diag->sweeps = sweeps;
  return finalize(prob, pp, beta, pen, gamma, lambda);
}

}  // namespace

SparseFit fit_mcp_at_lambda(const RegressionProblem& prob, double gamma,
                            double lambda, FitDiagnostics* diag) {
  if (!(gamma > 1.0)) throw ValidationError("fit_mcp_at_lambda: gamma must be > 1");
  return fit_at_lambda(prob, Penalty::mcp, gamma, lambda, diag);
}

SparseFit fit_lasso_at_lambda(const RegressionProblem& prob, double lambda,
                              FitDiagnostics* diag) {
  return fit_at_lambda(prob, Penalty::lasso, 3.0, lambda, diag);
}

RidgeRefit partial_ridge_refit(const RegressionProblem& prob,
                               const std::vector<std::size_t>& support,
                               double ridge_lambda) {
  validate_problem(prob);
  if (ridge_lambda < 0.0)
    throw ValidationError("partial_ridge_refit: negative ridge_lambda");
  const std::size_t n = prob.n();
  const std::size_t p = prob.p();
  std::vector<char> in_support(p, 0);
  for (std::size_t j : support) {
    if (j >= p || !prob.penalty_mask[j])
      throw ValidationError(
          "partial_ridge_refit: support must index penalized columns");
    in_support[j] = 1;
  }

  // Ridge-augmented normal equations over [1 | design], raw scale.
  Matrix cols(p, n);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) cols(j, i) = prob.design(i, j);

  Matrix m(p + 1, p + 1);
  std::vector<double> rhs(p + 1);
  m(0, 0) = static_cast<double>(n);
  rhs[0] = kern::sum(prob.response.data(), n);
  for (std::size_t j = 0; j < p; ++j) {
    const double s = kern::sum(cols.row(j), n);
    m(0, j + 1) = s;
    m(j + 1, 0) = s;
    rhs[j + 1] = kern::dot(cols.row(j), prob.response.data(), n);
    for (std::size_t l = 0; l <= j; ++l) {
      const double g = kern::dot(cols.row(j), cols.row(l), n);
      m(j + 1, l + 1) = g;
      m(l + 1, j + 1) = g;
    }
    if (prob.penalty_mask[j] && !in_support[j]) m(j + 1, j + 1) += ridge_lambda;
  }

  std::vector<double> sol;
  try {
    sol = solve_spd(std::move(m), std::move(rhs));
  } catch (const Error&) {
    throw Error(
        "partial_ridge_refit: singular normal equations (rank-deficient "
        "design without ridge regularization)");
  }
  RidgeRefit out;
  out.intercept = sol[0];
  out.coefficients.assign(sol.begin() + 1, sol.end());
  return out;
}

EstimateWithCI bootstrap_lpr_ci(const RegressionProblem& prob,
                                const AnalysisConfig& config,
                                std::uint64_t seed, unsigned threads) {
  validate_problem(prob);
  const std::size_t n = prob.n();
  const std::size_t p = prob.p();
  const double ridge = 1.0 / static_cast<double>(n);

  SparseFit full = fit_lasso(prob, config.lambda_grid_size, kBootstrapCvFolds);
  RidgeRefit point = partial_ridge_refit(prob, full.selected, ridge);

  const int reps = config.bootstrap_reps;
  Matrix draws(reps, p);
  std::vector<char> ok(reps, 0);

  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t b) {
    Rng rng(mix_seed(seed, {kStreamBootstrap, static_cast<std::uint64_t>(b)}));
    RegressionProblem rp;
    rp.design = Matrix(n, p);
    rp.response.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = static_cast<std::size_t>(rng.below(n));
      std::copy(prob.design.row(r), prob.design.row(r) + p, rp.design.row(i));
      rp.response[i] = prob.response[r];
    }
    rp.penalty_mask = prob.penalty_mask;
    rp.standardize_mask = prob.standardize_mask;
    rp.fold_seed =
        mix_seed(seed, {kStreamBootstrap, static_cast<std::uint64_t>(b),
                        kStreamFolds});

    // A resample with a constant response carries no information.
    const double mean = kern::sum(rp.response.data(), n) / n;
    double dev = 0.0;
    for (double v : rp.response) dev = std::max(dev, std::fabs(v - mean));
    if (dev <= 1e-12 * (1.0 + std::fabs(mean))) return;

    try {
      SparseFit sel = fit_lasso(rp, config.lambda_grid_size, kBootstrapCvFolds);
      RidgeRefit rr = partial_ridge_refit(rp, sel.selected, ridge);
      std::copy(rr.coefficients.begin(), rr.coefficients.end(), draws.row(b));
      ok[b] = 1;
    } catch (const Error&) {
      // Degenerate resample (e.g. constant covariate block); skip it.
    }
  });

  int used = 0;
  for (char c : ok) used += c;
  const int skipped = reps - used;
  if (skipped * 5 > reps)
    throw Error("bootstrap_lpr_ci: more than 20% of bootstrap resamples were "
                "degenerate (" +
                std::to_string(skipped) + "/" + std::to_string(reps) + ")");

  auto quantile7 = [](std::vector<double>& v, double q) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    if (m == 1) return v[0];
    const double h = (m - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, m - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
  };

  EstimateWithCI out;
  out.estimate_intercept = point.intercept;
  out.estimate = point.coefficients;
  out.level = config.ci_level;
  out.bootstrap_used = used;
  out.bootstrap_skipped = skipped;
  out.lower.resize(p);
  out.upper.resize(p);
  const double tail = (1.0 - config.ci_level) / 2.0;
  std::vector<double> sample;
  sample.reserve(used);
  for (std::size_t j = 0; j < p; ++j) {
    sample.clear();
    for (int b = 0; b < reps; ++b)
      if (ok[b]) sample.push_back(draws(b, j));
    out.lower[j] = quantile7(sample, tail);
    out.upper[j] = quantile7(sample, 1.0 - tail);
  }
  return out;
}

}  // namespace ifaa
