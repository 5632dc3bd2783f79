#ifndef NNPOST_SAMPLER_HPP
#define NNPOST_SAMPLER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nnpost/marginal.hpp"

namespace nnpost {

struct SamplerConfig {
  std::size_t draws = 10000;
  std::size_t warmup = 1000;
  // Initial proposal standard deviation in each unconstrained coordinate.
  double step_scale = 0.3;
  std::uint64_t seed = 0;
  bool adapt = true;

  void validate() const;
};

/// Random-walk Metropolis output on an unconstrained 2-D target.
struct MetropolisTrace {
  std::vector<std::array<double, 2>> draws;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  // Proposal scale in effect after warmup.
  double step_scale = 0.0;
};

using LogTarget2D = std::function<double(const std::array<double, 2>&)>;

/// Gaussian random-walk Metropolis. During warmup the proposal scale is
/// adapted (Robbins-Monro) toward an acceptance rate of 0.35 and, halfway
/// through, the proposal shape switches to the Cholesky
/// factor of the warmup-draw covariance. Adaptation is frozen for the
/// measured draws. Throws Error(sampler_failure) if no measured proposal
/// is accepted.
MetropolisTrace run_metropolis(const LogTarget2D& log_target, std::array<double, 2> start,
                               const SamplerConfig& config);

struct Chain {
  std::vector<double> sigma1;
  std::vector<double> sigma2;
  // draws x k; empty until draw_beta() fills it.
  Eigen::MatrixXd beta;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  double step_scale = 0.0;

  std::size_t size() const { return sigma1.size(); }
};

/// Samples (log sigma1, log sigma2) from log q~ + log sigma1 + log sigma2,
/// starting at the mode of q~.
Chain run_chain(const MarginalModel& model, const SamplerConfig& config);

/// For each chain draw, z ~ conditional_z(sigma1, sigma2) and beta = V z.
/// Returns a draws x k matrix.
Eigen::MatrixXd draw_beta(const MarginalModel& model, const Chain& chain, std::uint64_t seed);

/// Chain mean with its Monte Carlo standard error from batch means using
/// floor(sqrt(N)) batches.
struct McEstimate {
  double mean = 0.0;
  double mcse = 0.0;
};
McEstimate batch_means(std::span<const double> values);

}  // namespace nnpost

#endif  // NNPOST_SAMPLER_HPP
