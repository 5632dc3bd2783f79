#ifndef NNPOST_MOMENTS_HPP
#define NNPOST_MOMENTS_HPP

#include <string_view>
#include <vector>

#include "nnpost/quadrature.hpp"

namespace nnpost {

/// How cov(beta) is assembled from z-space moments.
///
///   exact  V (diag(E[v]) + E[m m^t] - E[m] E[m]^t) V^t   (total covariance)
///   paper  V diag(E[v]) V^t
///   diag   V diag(E[v] + E[m^2] - E[m]^2) V^t
///
/// m and v are the conditional mean and variance of z. `diag` keeps the
/// per-coordinate variance of z exact but drops the cross-covariance of m
/// between coordinates; it costs O(k) per node instead of O(k^2).
enum class CovMode { exact, paper, diag };

std::string_view to_string(CovMode mode);
/// Accepts "exact", "paper" and "diag"; throws Error(invalid_argument).
CovMode parse_cov_mode(std::string_view text);

namespace functional_names {
inline constexpr std::string_view sigma1 = "sigma1";
inline constexpr std::string_view sigma2 = "sigma2";
inline constexpr std::string_view sigma1_sq = "sigma1_sq";
inline constexpr std::string_view sigma2_sq = "sigma2_sq";
inline constexpr std::string_view z_mean = "z_mean";
inline constexpr std::string_view z_var = "z_var";
inline constexpr std::string_view z_mean_sq = "z_mean_sq";
inline constexpr std::string_view z_mean_outer = "z_mean_outer";
}  // namespace functional_names

/// The functionals posterior_summary() needs for `mode` on a k-dimensional model.
std::vector<Functional> standard_functionals(Index k, CovMode mode);

PosteriorSummary posterior_summary(const MarginalModel& model, const MomentAccumulator& acc,
                                   CovMode mode);

}  // namespace nnpost

#endif  // NNPOST_MOMENTS_HPP
