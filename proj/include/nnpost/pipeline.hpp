#ifndef NNPOST_PIPELINE_HPP
#define NNPOST_PIPELINE_HPP

#include <optional>

#include "nnpost/moments.hpp"

namespace nnpost {

struct FitOptions {
  Hyperparams hyper;
  CovMode cov_mode = CovMode::exact;
  // Overrides auto_bounds() when set; nodes_per_axis is taken from here.
  std::optional<GridSpec> grid;
  unsigned threads = 1;
};

struct FitResult {
  PosteriorSummary summary;
  GridSpec grid;
};

/// Bounds, trapezoid sweep and moment assembly on a precomputed basis.
FitResult fit(std::shared_ptr<const SvdBasis> basis, const FitOptions& options);

/// Convenience: factorize then fit.
FitResult fit(const RegressionData& data, const FitOptions& options);

}  // namespace nnpost

#endif  // NNPOST_PIPELINE_HPP
