#ifndef NNPOST_ORACLE_HPP
#define NNPOST_ORACLE_HPP

#include "nnpost/model.hpp"

// Brute-force reference for small models (k <= 2). Integrates the full
// density q(sigma1, sigma2, beta) on tensor grids without using the SVD or
// the closed-form marginal. Used by the test suites only.
namespace nnpost::oracle {

struct OracleGrid {
  // Trapezoid nodes per axis over (log sigma1, log sigma2).
  int sigma_nodes = 160;
  // Trapezoid nodes per beta axis, spanning +-beta_halfwidth standard
  // deviations of the conditional distribution of beta at each sigma node.
  int beta_nodes = 40;
  double beta_halfwidth = 11.0;
  // Log-density drop required at the edges of the log-sigma box.
  double tail_drop = 60.0;
};

/// log of the integral of q(sigma1, sigma2, beta) over beta in R^k.
double log_beta_integral(const RegressionData& data, double gamma, double sigma1,
                         double sigma2, const OracleGrid& grid = {});

/// Normalized moments of beta under q at fixed sigmas, with the log of the
/// beta integral.
struct ConditionalBeta {
  double log_integral = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
ConditionalBeta conditional_beta(const RegressionData& data, double gamma, double sigma1,
                                 double sigma2, const OracleGrid& grid = {});

/// All first and second moments of (sigma1, sigma2, beta) under q.
/// Throws Error(invalid_argument) for k > 2.
PosteriorSummary brute_moments(const RegressionData& data, double gamma,
                               const OracleGrid& grid = {});

/// Runs brute_moments at `grid` and again with the node spacing halved. Returns the
/// finer result; `max_change` receives the largest absolute change in any
/// reported moment. Throws Error(numerical_failure) if it exceeds `tol`.
PosteriorSummary converged_moments(const RegressionData& data, double gamma,
                                   const OracleGrid& grid, double tol, double* max_change = nullptr);

}  // namespace nnpost::oracle

#endif  // NNPOST_ORACLE_HPP
