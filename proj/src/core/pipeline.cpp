#include "nnpost/pipeline.hpp"

#include "nnpost/error.hpp"

namespace nnpost {

FitResult fit(std::shared_ptr<const SvdBasis> basis, const FitOptions& options) {
  options.hyper.validate();
  const MarginalModel model(std::move(basis), options.hyper.gamma);
  FitResult result;
  result.grid = options.grid ? *options.grid : auto_bounds(model, options.hyper);
  result.grid.validate();
  const auto functionals = standard_functionals(model.k(), options.cov_mode);
  const MomentAccumulator acc = integrate(model, result.grid, functionals, options.threads);
  result.summary = posterior_summary(model, acc, options.cov_mode);
  return result;
}

FitResult fit(const RegressionData& data, const FitOptions& options) {
  return fit(std::make_shared<const SvdBasis>(factorize(data)), options);
}

}  // namespace nnpost
