#ifndef NNPOST_MODEL_HPP
#define NNPOST_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace nnpost {

using Index = Eigen::Index;

/// Design matrix (n observations by k predictors) and response.
struct RegressionData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  Index n() const { return x.rows(); }
  Index k() const { return x.cols(); }
};

/// Prior strength on log(sigma1) plus numerical controls for the
/// quadrature stage.
struct Hyperparams {
  double gamma = 8.0;
  int grid_nodes = 200;
  // Required drop of log q~ from its maximum to the rectangle boundary.
  double tail_drop = 46.0;
  double sigma_floor = 1e-8;

  void validate() const;
};

struct PosteriorSummary {
  double mean_sigma1 = 0.0;
  double mean_sigma2 = 0.0;
  double var_sigma1 = 0.0;
  double var_sigma2 = 0.0;
  Eigen::VectorXd mean_beta;
  Eigen::MatrixXd cov_beta;
};

/// Checks shape and finiteness. Returns `data` unchanged on success and
/// throws nnpost::Error naming the offending row/column otherwise.
const RegressionData& validate(const RegressionData& data);

struct SyntheticData {
  RegressionData data;
  Eigen::VectorXd beta_true;
};

/// Draws X with iid N(0,1) entries, beta_true iid N(0,1) and
/// y = X beta_true + eps with eps iid N(0,1).
///
/// Variates are consumed in a fixed order from one Rng(seed): X row-major,
/// then beta_true, then eps. Output is bit-reproducible for a given seed.
SyntheticData generate_synthetic(Index n, Index k, std::uint64_t seed);

}  // namespace nnpost

#endif  // NNPOST_MODEL_HPP
