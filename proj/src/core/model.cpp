#include "nnpost/model.hpp"

#include <cmath>
#include <string>

#include "nnpost/error.hpp"
#include "nnpost/random.hpp"

namespace nnpost {

void Hyperparams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::invalid_argument, "gamma must be positive and finite");
  }
  if (grid_nodes < 2) {
    throw Error(ErrorCode::invalid_argument, "grid_nodes must be at least 2");
  }
  if (!(tail_drop > 0.0) || !std::isfinite(tail_drop)) {
    throw Error(ErrorCode::invalid_argument, "tail_drop must be positive and finite");
  }
  if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) {
    throw Error(ErrorCode::invalid_argument, "sigma_floor must be positive and finite");
  }
}

const RegressionData& validate(const RegressionData& data) {
  if (data.x.rows() == 0 || data.x.cols() == 0) {
    throw Error(ErrorCode::empty_input,
                "design matrix is empty (" + std::to_string(data.x.rows()) + " x " +
                    std::to_string(data.x.cols()) + ")");
  }
  if (data.y.size() != data.x.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "X has " + std::to_string(data.x.rows()) + " rows but y has " +
                    std::to_string(data.y.size()) + " entries");
  }
  for (Index i = 0; i < data.x.rows(); ++i) {
    for (Index j = 0; j < data.x.cols(); ++j) {
      if (!std::isfinite(data.x(i, j))) {
        throw Error(ErrorCode::non_finite, "X row " + std::to_string(i + 1) + ", column " +
                                               std::to_string(j + 1) + " is not finite");
      }
    }
    if (!std::isfinite(data.y(i))) {
      throw Error(ErrorCode::non_finite, "y row " + std::to_string(i + 1) + " is not finite");
    }
  }
  return data;
}

SyntheticData generate_synthetic(Index n, Index k, std::uint64_t seed) {
  if (n < 1 || k < 1) {
    throw Error(ErrorCode::invalid_argument, "generate_synthetic requires n >= 1 and k >= 1");
  }
  Rng rng(seed);
  SyntheticData out;
  out.data.x.resize(n, k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) out.data.x(i, j) = rng.normal();
  }
  out.beta_true.resize(k);
  for (Index j = 0; j < k; ++j) out.beta_true(j) = rng.normal();
  out.data.y = out.data.x * out.beta_true;
  for (Index i = 0; i < n; ++i) out.data.y(i) += rng.normal();
  return out;
}

}  // namespace nnpost
