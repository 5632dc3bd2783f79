#include "nnpost/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nnpost/error.hpp"
#include "nnpost/quadrature.hpp"
#include "nnpost/random.hpp"

namespace nnpost {

namespace {

constexpr double kTargetAcceptance = 0.35;

using Point = std::array<double, 2>;

// Proposal x + scale * L * eps with L lower triangular.
struct Proposal {
  double scale;
  double l00 = 1.0, l10 = 0.0, l11 = 1.0;

  Point operator()(const Point& x, Rng& rng) const {
    const double e0 = rng.normal();
    const double e1 = rng.normal();
    return {x[0] + scale * l00 * e0, x[1] + scale * (l10 * e0 + l11 * e1)};
  }
};

bool set_shape_from_draws(Proposal& p, const std::vector<Point>& draws, std::size_t from,
                          std::size_t to) {
  const double count = static_cast<double>(to - from);
  if (count < 10) return false;
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    m0 += draws[i][0];
    m1 += draws[i][1];
  }
  m0 /= count;
  m1 /= count;
  double c00 = 0.0, c01 = 0.0, c11 = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    const double d0 = draws[i][0] - m0;
    const double d1 = draws[i][1] - m1;
    c00 += d0 * d0;
    c01 += d0 * d1;
    c11 += d1 * d1;
  }
  c00 /= count - 1;
  c01 /= count - 1;
  c11 /= count - 1;
  // Small ridge keeps the factor well defined if the warmup draws collapsed
  // onto a line.
  const double ridge = 1e-10 + 1e-6 * (c00 + c11);
  c00 += ridge;
  c11 += ridge;
  if (!(c00 > 0.0)) return false;
  const double l00 = std::sqrt(c00);
  const double l10 = c01 / l00;
  const double rem = c11 - l10 * l10;
  if (!(rem > 0.0) || !std::isfinite(rem)) return false;
  p.l00 = l00;
  p.l10 = l10;
  p.l11 = std::sqrt(rem);
  return true;
}

}  // namespace

void SamplerConfig::validate() const {
  if (draws < 1) throw Error(ErrorCode::invalid_argument, "draws must be at least 1");
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) {
    throw Error(ErrorCode::invalid_argument, "step_scale must be positive and finite");
  }
}

MetropolisTrace run_metropolis(const LogTarget2D& log_target, Point start,
                               const SamplerConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Point x = start;
  double lx = log_target(x);
  if (!std::isfinite(lx)) {
    throw Error(ErrorCode::sampler_failure, "log target is not finite at the starting point");
  }

  Proposal proposal{config.step_scale};
  double log_scale = std::log(config.step_scale);
  std::size_t adapt_clock = 0;
  std::vector<Point> warmup_draws;
  warmup_draws.reserve(config.warmup);

  auto step = [&](double& accept_prob) {
    const Point y = proposal(x, rng);
    const double ly = log_target(y);
    if (std::isnan(ly) || ly == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::sampler_failure, "log target returned NaN or +inf");
    }
    accept_prob = std::isfinite(ly) ? std::min(1.0, std::exp(ly - lx)) : 0.0;
    if (rng.uniform() < accept_prob) {
      x = y;
      lx = ly;
      return true;
    }
    return false;
  };

  const std::size_t reshape_at = config.warmup / 2;
  for (std::size_t t = 0; t < config.warmup; ++t) {
    double alpha = 0.0;
    step(alpha);
    warmup_draws.push_back(x);
    if (!config.adapt) continue;
    ++adapt_clock;
    // Robbins-Monro on the log scale; the gain decays so adaptation settles.
    const double gain = 1.0 / std::pow(static_cast<double>(adapt_clock), 0.6);
    log_scale = std::clamp(log_scale + gain * (alpha - kTargetAcceptance), -30.0, 10.0);
    proposal.scale = std::exp(log_scale);
    if (t + 1 == reshape_at && set_shape_from_draws(proposal, warmup_draws, reshape_at / 2,
                                                    warmup_draws.size())) {
      log_scale = std::log(2.38 / std::sqrt(2.0));
      proposal.scale = std::exp(log_scale);
      adapt_clock = 0;
    }
  }

  MetropolisTrace trace;
  trace.step_scale = proposal.scale;
  trace.draws.reserve(config.draws);
  for (std::size_t t = 0; t < config.draws; ++t) {
    double alpha = 0.0;
    if (step(alpha)) ++trace.accepted;
    trace.draws.push_back(x);
  }
  trace.acceptance_rate = static_cast<double>(trace.accepted) / static_cast<double>(config.draws);
  if (trace.accepted == 0) {
    throw Error(ErrorCode::sampler_failure,
                "no proposal accepted after warmup (proposal scale " +
                    std::to_string(proposal.scale) + ", " + std::to_string(config.draws) +
                    " draws, log target at current point " + std::to_string(lx) + ")");
  }
  return trace;
}

Chain run_chain(const MarginalModel& model, const SamplerConfig& config) {
  config.validate();
  // Start at the mode of the density actually sampled (log-scale Jacobian
  // included), which exists even when q~ itself peaks at sigma2 -> 0.
  const Mode mode = find_mode([&model](double s1, double s2) {
    return model.log_qtilde(s1, s2) + std::log(s1) + std::log(s2);
  });
  const LogTarget2D target = [&model](const Point& u) {
    const double s1 = std::exp(u[0]);
    const double s2 = std::exp(u[1]);
    if (!(s1 > 0.0) || !(s2 > 0.0) || !std::isfinite(s1) || !std::isfinite(s2)) {
      return -std::numeric_limits<double>::infinity();
    }
    return model.log_qtilde(s1, s2) + u[0] + u[1];
  };
  const MetropolisTrace trace =
      run_metropolis(target, {std::log(mode.sigma1), std::log(mode.sigma2)}, config);

  Chain chain;
  chain.sigma1.reserve(trace.draws.size());
  chain.sigma2.reserve(trace.draws.size());
  for (const auto& u : trace.draws) {
    chain.sigma1.push_back(std::exp(u[0]));
    chain.sigma2.push_back(std::exp(u[1]));
  }
  chain.accepted = trace.accepted;
  chain.acceptance_rate = trace.acceptance_rate;
  chain.step_scale = trace.step_scale;
  return chain;
}

Eigen::MatrixXd draw_beta(const MarginalModel& model, const Chain& chain, std::uint64_t seed) {
  if (chain.sigma1.empty() || chain.sigma1.size() != chain.sigma2.size()) {
    throw Error(ErrorCode::invalid_argument, "chain has no draws or mismatched sigma draws");
  }
  const Index k = model.k();
  const auto draws = static_cast<Index>(chain.size());
  Rng rng(seed);
  Eigen::MatrixXd z(draws, k);
  Eigen::VectorXd mean(k), var(k);
  for (Index d = 0; d < draws; ++d) {
    model.conditional_z(chain.sigma1[d], chain.sigma2[d], std::span<double>(mean.data(), k),
                        std::span<double>(var.data(), k));
    for (Index i = 0; i < k; ++i) z(d, i) = mean(i) + std::sqrt(var(i)) * rng.normal();
  }
  return z * model.basis().v().transpose();
}

McEstimate batch_means(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "batch_means of an empty chain");
  McEstimate est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(n);

  const auto batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  const std::size_t size = batches > 0 ? n / batches : 0;
  if (batches < 2 || size < 1) {
    est.mcse = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < size; ++i) means[b] += values[b * size + i];
    means[b] /= static_cast<double>(size);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double var_batch = ss / static_cast<double>(batches - 1);
  est.mcse = std::sqrt(var_batch / static_cast<double>(batches));
  return est;
}

}  // namespace nnpost
