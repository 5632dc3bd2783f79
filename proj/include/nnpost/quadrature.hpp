#ifndef NNPOST_QUADRATURE_HPP
#define NNPOST_QUADRATURE_HPP

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnpost/marginal.hpp"

namespace nnpost {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform tensor grid over (sigma1, sigma2).
struct GridSpec {
  Interval sigma1;
  Interval sigma2;
  int nodes_per_axis = 200;

  void validate() const;
};

/// What a functional sees at one grid node. `mean`/`variance` hold the
/// conditional distribution of z and are empty when integrating a plain
/// density that has no such structure.
struct Node {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  std::span<const double> mean;
  std::span<const double> variance;
};

/// A vector-valued function of the grid node to be integrated against the
/// density. With `outer` set, eval still writes a vector g of length `size`,
/// but the accumulated quantity is the packed upper triangle of g g^t
/// (row-major, size*(size+1)/2 entries).
struct Functional {
  std::string name;
  std::size_t size = 1;
  std::function<void(const Node&, std::span<double>)> eval;
  bool outer = false;

  std::size_t result_size() const { return outer ? size * (size + 1) / 2 : size; }
};

/// Trapezoid sums of f * exp(log q - log_scale) for each requested
/// functional, plus the same sum for f = 1 (the normalizer).
class MomentAccumulator {
 public:
  MomentAccumulator(double normalizer, double log_scale,
                    std::map<std::string, std::vector<double>, std::less<>> raw);

  double normalizer() const { return normalizer_; }
  double log_scale() const { return log_scale_; }
  bool contains(std::string_view name) const;
  /// Throws Error(invalid_argument) if `name` was not requested.
  std::span<const double> raw(std::string_view name) const;
  /// raw(name) / normalizer().
  std::vector<double> expectation(std::string_view name) const;

 private:
  double normalizer_;
  double log_scale_;
  std::map<std::string, std::vector<double>, std::less<>> raw_;
};

using LogDensity2D = std::function<double(double sigma1, double sigma2)>;

struct Mode {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double log_density = 0.0;
};

/// Maximizer of log q~: a 64 x 64 log-spaced scan over [1e-3, 1e3]^2, then
/// coordinate-wise golden-section refinement in log space. Throws
/// Error(mode_search_failure) if the maximizer leaves [1e-6, 1e6]^2.
Mode find_mode(const MarginalModel& model);
Mode find_mode(const LogDensity2D& log_density);

/// Rectangle around the mode whose boundary (sampled at the grid nodes)
/// sits at least hyper.tail_drop below the mode in log density. Lower
/// edges never go below hyper.sigma_floor.
GridSpec auto_bounds(const MarginalModel& model, const Hyperparams& hyper);
GridSpec auto_bounds(const LogDensity2D& log_density, const Hyperparams& hyper);

/// One sweep of log q~ over the trapezoid grid, shared by all functionals.
/// Work is split into a fixed number of row blocks reduced in order, so the
/// result does not depend on `threads` (0 = hardware concurrency).
MomentAccumulator integrate(const MarginalModel& model, const GridSpec& grid,
                            std::span<const Functional> functionals, unsigned threads = 1);
MomentAccumulator integrate(const LogDensity2D& log_density, const GridSpec& grid,
                            std::span<const Functional> functionals, unsigned threads = 1);

}  // namespace nnpost

#endif  // NNPOST_QUADRATURE_HPP
