#include "nnpost/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nnpost/error.hpp"

namespace nnpost::oracle {

namespace {

constexpr int kMaxK = 2;
using Vec = std::array<double, kMaxK>;

// Unnormalized log q(sigma1, sigma2, beta) evaluated straight from its
// definition: residuals are formed from X and y for every beta.
class FullDensity {
 public:
  FullDensity(const RegressionData& data, double gamma) : data_(data), gamma_(gamma) {
    validate(data_);
    if (data_.k() > kMaxK) {
      throw Error(ErrorCode::invalid_argument,
                  "brute-force oracle supports k <= 2 (got k = " + std::to_string(data_.k()) + ")");
    }
    if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_argument, "gamma must be positive");
    k_ = static_cast<int>(data_.k());
    n_ = static_cast<int>(data_.n());
    for (int a = 0; a < k_; ++a) {
      for (int b = 0; b < k_; ++b) gram_[a][b] = data_.x.col(a).dot(data_.x.col(b));
      xty_[a] = data_.x.col(a).dot(data_.y);
    }
  }

  int k() const { return k_; }

  double log_q(double s1, double s2, const Vec& beta) const {
    double rss = 0.0;
    for (int i = 0; i < n_; ++i) {
      double r = -data_.y(i);
      for (int a = 0; a < k_; ++a) r += data_.x(i, a) * beta[a];
      rss += r * r;
    }
    double bb = 0.0;
    for (int a = 0; a < k_; ++a) bb += beta[a] * beta[a];
    const double l1 = std::log(s1);
    return -(k_ + 1) * l1 - n_ * std::log(s2) - gamma_ * l1 * l1 - 0.5 * s2 * s2 -
           rss / (2.0 * s2 * s2) - bb / (2.0 * s1 * s1);
  }

  // Conditional mode of beta and lower Cholesky factor of its conditional
  // covariance, from the k x k normal equations. Used only to place nodes.
  void conditional_frame(double s1, double s2, Vec& center, double chol[kMaxK][kMaxK]) const {
    const double p2 = 1.0 / (s2 * s2);
    const double p1 = 1.0 / (s1 * s1);
    if (k_ == 1) {
      const double a = gram_[0][0] * p2 + p1;
      center[0] = xty_[0] * p2 / a;
      chol[0][0] = 1.0 / std::sqrt(a);
      return;
    }
    const double a00 = gram_[0][0] * p2 + p1;
    const double a01 = gram_[0][1] * p2;
    const double a11 = gram_[1][1] * p2 + p1;
    const double det = a00 * a11 - a01 * a01;
    const double c00 = a11 / det;
    const double c01 = -a01 / det;
    const double c11 = a00 / det;
    center[0] = c00 * xty_[0] * p2 + c01 * xty_[1] * p2;
    center[1] = c01 * xty_[0] * p2 + c11 * xty_[1] * p2;
    chol[0][0] = std::sqrt(c00);
    chol[1][0] = c01 / chol[0][0];
    chol[0][1] = 0.0;
    chol[1][1] = std::sqrt(std::max(c11 - chol[1][0] * chol[1][0], 0.0));
  }

 private:
  const RegressionData& data_;
  double gamma_;
  int k_ = 0;
  int n_ = 0;
  double gram_[kMaxK][kMaxK]{};
  Vec xty_{};
};

std::vector<double> trapezoid_weights(int nodes, double h) {
  std::vector<double> w(nodes, h);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

// Integral of q over beta at fixed sigmas: log of the integral and the
// conditional first and second moments of beta.
struct BetaIntegral {
  double log_value = 0.0;
  Vec mean{};
  double second[kMaxK][kMaxK]{};
};

BetaIntegral integrate_beta(const FullDensity& q, double s1, double s2, const OracleGrid& grid) {
  const int k = q.k();
  Vec center{};
  double chol[kMaxK][kMaxK]{};
  q.conditional_frame(s1, s2, center, chol);
  const double ref = q.log_q(s1, s2, center);

  const int m = grid.beta_nodes;
  const double h = 2.0 * grid.beta_halfwidth / (m - 1);
  const auto w = trapezoid_weights(m, h);
  std::vector<double> t(m);
  for (int j = 0; j < m; ++j) t[j] = -grid.beta_halfwidth + h * j;

  double s0 = 0.0;
  Vec s_beta{};
  double s_bb[kMaxK][kMaxK]{};
  auto accumulate = [&](const Vec& tt, double weight) {
    Vec beta{};
    for (int a = 0; a < k; ++a) {
      beta[a] = center[a];
      for (int b = 0; b <= a; ++b) beta[a] += chol[a][b] * tt[b];
    }
    const double f = weight * std::exp(q.log_q(s1, s2, beta) - ref);
    s0 += f;
    for (int a = 0; a < k; ++a) {
      s_beta[a] += f * beta[a];
      for (int b = 0; b < k; ++b) s_bb[a][b] += f * beta[a] * beta[b];
    }
  };
  if (k == 1) {
    for (int j = 0; j < m; ++j) accumulate({t[j], 0.0}, w[j]);
  } else {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) accumulate({t[i], t[j]}, w[i] * w[j]);
    }
  }

  double log_det = 0.0;
  for (int a = 0; a < k; ++a) log_det += std::log(chol[a][a]);
  BetaIntegral out;
  out.log_value = ref + std::log(s0) + log_det;
  for (int a = 0; a < k; ++a) {
    out.mean[a] = s_beta[a] / s0;
    for (int b = 0; b < k; ++b) out.second[a][b] = s_bb[a][b] / s0;
  }
  return out;
}

struct Box {
  double lo[2] = {-2.0, -2.0};
  double hi[2] = {2.0, 2.0};
};

// Log of the sigma-marginal in log coordinates (Jacobian included).
double log_marginal_u(const FullDensity& q, double u1, double u2, const OracleGrid& grid) {
  return integrate_beta(q, std::exp(u1), std::exp(u2), grid).log_value + u1 + u2;
}

// Grows a box in (log sigma1, log sigma2) one unit per side until every edge
// of a 33 x 33 probe lattice sits tail_drop below the probed maximum.
Box find_box(const FullDensity& q, const OracleGrid& grid) {
  constexpr int probe = 33;
  constexpr double limit = 80.0;
  Box box;
  for (int iter = 0; iter < 400; ++iter) {
    std::vector<double> vals(probe * probe);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < probe; ++i) {
      for (int j = 0; j < probe; ++j) {
        const double u1 = box.lo[0] + (box.hi[0] - box.lo[0]) * i / (probe - 1);
        const double u2 = box.lo[1] + (box.hi[1] - box.lo[1]) * j / (probe - 1);
        vals[i * probe + j] = log_marginal_u(q, u1, u2, grid);
        best = std::max(best, vals[i * probe + j]);
      }
    }
    double edge[4] = {-INFINITY, -INFINITY, -INFINITY, -INFINITY};
    for (int t = 0; t < probe; ++t) {
      edge[0] = std::max(edge[0], vals[0 * probe + t]);
      edge[1] = std::max(edge[1], vals[(probe - 1) * probe + t]);
      edge[2] = std::max(edge[2], vals[t * probe + 0]);
      edge[3] = std::max(edge[3], vals[t * probe + probe - 1]);
    }
    bool grew = false;
    double* side[4] = {&box.lo[0], &box.hi[0], &box.lo[1], &box.hi[1]};
    const double dir[4] = {-1.0, 1.0, -1.0, 1.0};
    for (int s = 0; s < 4; ++s) {
      if (best - edge[s] < grid.tail_drop && std::abs(*side[s]) < limit) {
        *side[s] += dir[s];
        grew = true;
      }
    }
    if (!grew) return box;
  }
  throw Error(ErrorCode::numerical_failure, "oracle could not bound the sigma integrand");
}

}  // namespace

double log_beta_integral(const RegressionData& data, double gamma, double sigma1, double sigma2,
                         const OracleGrid& grid) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "sigmas must be positive");
  }
  const FullDensity q(data, gamma);
  return integrate_beta(q, sigma1, sigma2, grid).log_value;
}

ConditionalBeta conditional_beta(const RegressionData& data, double gamma, double sigma1,
                                 double sigma2, const OracleGrid& grid) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "sigmas must be positive");
  }
  const FullDensity q(data, gamma);
  const int k = q.k();
  const auto cell = integrate_beta(q, sigma1, sigma2, grid);
  ConditionalBeta out;
  out.log_integral = cell.log_value;
  out.mean.resize(k);
  out.cov.resize(k, k);
  for (int a = 0; a < k; ++a) out.mean(a) = cell.mean[a];
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) out.cov(a, b) = cell.second[a][b] - cell.mean[a] * cell.mean[b];
  }
  return out;
}

PosteriorSummary brute_moments(const RegressionData& data, double gamma, const OracleGrid& grid) {
  if (grid.sigma_nodes < 2 || grid.beta_nodes < 2 || !(grid.beta_halfwidth > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "invalid oracle grid");
  }
  const FullDensity q(data, gamma);
  const int k = q.k();
  const Box box = find_box(q, grid);

  const int m = grid.sigma_nodes;
  const double h1 = (box.hi[0] - box.lo[0]) / (m - 1);
  const double h2 = (box.hi[1] - box.lo[1]) / (m - 1);
  const auto w1 = trapezoid_weights(m, h1);
  const auto w2 = trapezoid_weights(m, h2);

  std::vector<BetaIntegral> inner(static_cast<std::size_t>(m) * m);
  std::vector<double> log_weight(inner.size());
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double u1 = box.lo[0] + h1 * i;
    for (int j = 0; j < m; ++j) {
      const double u2 = box.lo[1] + h2 * j;
      auto& cell = inner[i * m + j];
      cell = integrate_beta(q, std::exp(u1), std::exp(u2), grid);
      log_weight[i * m + j] = cell.log_value + u1 + u2 + std::log(w1[i] * w2[j]);
      top = std::max(top, log_weight[i * m + j]);
    }
  }

  double total = 0.0;
  double e_s[2] = {0.0, 0.0};
  double e_ss[2] = {0.0, 0.0};
  Vec e_b{};
  double e_bb[kMaxK][kMaxK]{};
  for (int i = 0; i < m; ++i) {
    const double s1 = std::exp(box.lo[0] + h1 * i);
    for (int j = 0; j < m; ++j) {
      const double s2 = std::exp(box.lo[1] + h2 * j);
      const auto& cell = inner[i * m + j];
      const double wgt = std::exp(log_weight[i * m + j] - top);
      total += wgt;
      e_s[0] += wgt * s1;
      e_s[1] += wgt * s2;
      e_ss[0] += wgt * s1 * s1;
      e_ss[1] += wgt * s2 * s2;
      for (int a = 0; a < k; ++a) {
        e_b[a] += wgt * cell.mean[a];
        for (int b = 0; b < k; ++b) e_bb[a][b] += wgt * cell.second[a][b];
      }
    }
  }

  PosteriorSummary out;
  out.mean_sigma1 = e_s[0] / total;
  out.mean_sigma2 = e_s[1] / total;
  out.var_sigma1 = e_ss[0] / total - out.mean_sigma1 * out.mean_sigma1;
  out.var_sigma2 = e_ss[1] / total - out.mean_sigma2 * out.mean_sigma2;
  out.mean_beta.resize(k);
  out.cov_beta.resize(k, k);
  for (int a = 0; a < k; ++a) out.mean_beta(a) = e_b[a] / total;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      out.cov_beta(a, b) = e_bb[a][b] / total - out.mean_beta(a) * out.mean_beta(b);
    }
  }
  return out;
}

PosteriorSummary converged_moments(const RegressionData& data, double gamma,
                                   const OracleGrid& grid, double tol, double* max_change) {
  const PosteriorSummary coarse = brute_moments(data, gamma, grid);
  OracleGrid finer = grid;
  finer.sigma_nodes = 2 * grid.sigma_nodes - 1;
  finer.beta_nodes = 2 * grid.beta_nodes - 1;
  const PosteriorSummary fine = brute_moments(data, gamma, finer);

  double change = std::max({std::abs(fine.mean_sigma1 - coarse.mean_sigma1),
                            std::abs(fine.mean_sigma2 - coarse.mean_sigma2),
                            std::abs(fine.var_sigma1 - coarse.var_sigma1),
                            std::abs(fine.var_sigma2 - coarse.var_sigma2),
                            (fine.mean_beta - coarse.mean_beta).cwiseAbs().maxCoeff(),
                            (fine.cov_beta - coarse.cov_beta).cwiseAbs().maxCoeff()});
  if (max_change) *max_change = change;
  if (!(change <= tol)) {
    throw Error(ErrorCode::numerical_failure,
                "oracle not converged: halving the grid spacing changed a moment by " +
                    std::to_string(change));
  }
  return fine;
}

}  // namespace nnpost::oracle
