#include "nnpost/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnpost/error.hpp"

namespace nnpost {

namespace {

Functional scalar(std::string_view name, double (*value)(const Node&)) {
  Functional f;
  f.name = std::string(name);
  f.size = 1;
  f.eval = [value](const Node& node, std::span<double> out) { out[0] = value(node); };
  return f;
}

Functional per_coordinate(std::string_view name, std::size_t k,
                          void (*fill)(const Node&, std::span<double>), bool outer = false) {
  Functional f;
  f.name = std::string(name);
  f.size = k;
  f.outer = outer;
  f.eval = [fill](const Node& node, std::span<double> out) {
    if (node.mean.size() != out.size()) {
      throw Error(ErrorCode::invalid_argument,
                  "z-space functionals need a marginal model with matching k");
    }
    fill(node, out);
  };
  return f;
}

void copy_mean(const Node& node, std::span<double> out) {
  std::copy(node.mean.begin(), node.mean.end(), out.begin());
}

double checked_variance(double second, double first, const char* what) {
  const double var = second - first * first;
  if (var < -1e-12 * std::max(1.0, std::abs(second))) {
    throw Error(ErrorCode::numerical_failure,
                std::string("negative variance for ") + what + ": " + std::to_string(var));
  }
  return std::max(var, 0.0);
}

}  // namespace

std::string_view to_string(CovMode mode) {
  switch (mode) {
    case CovMode::exact: return "exact";
    case CovMode::paper: return "paper";
    case CovMode::diag: return "diag";
  }
  return "exact";
}

CovMode parse_cov_mode(std::string_view text) {
  if (text == "exact") return CovMode::exact;
  if (text == "paper") return CovMode::paper;
  if (text == "diag") return CovMode::diag;
  throw Error(ErrorCode::invalid_argument,
              "unknown covariance mode '" + std::string(text) + "' (expected exact|paper|diag)");
}

std::vector<Functional> standard_functionals(Index k, CovMode mode) {
  namespace fn = functional_names;
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be positive");
  const auto kk = static_cast<std::size_t>(k);
  std::vector<Functional> out;
  out.push_back(scalar(fn::sigma1, [](const Node& n) { return n.sigma1; }));
  out.push_back(scalar(fn::sigma2, [](const Node& n) { return n.sigma2; }));
  out.push_back(scalar(fn::sigma1_sq, [](const Node& n) { return n.sigma1 * n.sigma1; }));
  out.push_back(scalar(fn::sigma2_sq, [](const Node& n) { return n.sigma2 * n.sigma2; }));
  out.push_back(per_coordinate(fn::z_mean, kk, copy_mean));
  out.push_back(per_coordinate(fn::z_var, kk, [](const Node& n, std::span<double> o) {
    std::copy(n.variance.begin(), n.variance.end(), o.begin());
  }));
  switch (mode) {
    case CovMode::exact:
      out.push_back(per_coordinate(fn::z_mean_outer, kk, copy_mean, true));
      break;
    case CovMode::diag:
      out.push_back(per_coordinate(fn::z_mean_sq, kk, [](const Node& n, std::span<double> o) {
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = n.mean[i] * n.mean[i];
      }));
      break;
    case CovMode::paper:
      break;
  }
  return out;
}

PosteriorSummary posterior_summary(const MarginalModel& model, const MomentAccumulator& acc,
                                   CovMode mode) {
  namespace fn = functional_names;
  const Index k = model.k();
  const auto expect_vector = [&](std::string_view name, Index length) {
    const auto values = acc.expectation(name);
    if (static_cast<Index>(values.size()) != length) {
      throw Error(ErrorCode::dimension_mismatch,
                  "functional '" + std::string(name) + "' has the wrong length");
    }
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(values.data(), length));
  };

  PosteriorSummary s;
  s.mean_sigma1 = expect_vector(fn::sigma1, 1)(0);
  s.mean_sigma2 = expect_vector(fn::sigma2, 1)(0);
  s.var_sigma1 = checked_variance(expect_vector(fn::sigma1_sq, 1)(0), s.mean_sigma1, "sigma1");
  s.var_sigma2 = checked_variance(expect_vector(fn::sigma2_sq, 1)(0), s.mean_sigma2, "sigma2");

  const Eigen::VectorXd mean_z = expect_vector(fn::z_mean, k);
  const Eigen::VectorXd var_z = expect_vector(fn::z_var, k);
  const Eigen::MatrixXd& v = model.basis().v();
  s.mean_beta = v * mean_z;

  Eigen::MatrixXd cov_z;
  switch (mode) {
    case CovMode::paper:
      cov_z = var_z.asDiagonal();
      break;
    case CovMode::diag: {
      const Eigen::VectorXd sq = expect_vector(fn::z_mean_sq, k);
      Eigen::VectorXd d(k);
      for (Index i = 0; i < k; ++i) d(i) = var_z(i) + checked_variance(sq(i), mean_z(i), "z");
      cov_z = d.asDiagonal();
      break;
    }
    case CovMode::exact: {
      const Eigen::VectorXd packed = expect_vector(fn::z_mean_outer, k * (k + 1) / 2);
      cov_z.resize(k, k);
      Index p = 0;
      for (Index r = 0; r < k; ++r) {
        for (Index c = r; c < k; ++c, ++p) {
          const double value = packed(p) - mean_z(r) * mean_z(c);
          cov_z(r, c) = value;
          cov_z(c, r) = value;
        }
      }
      cov_z.diagonal() += var_z;
      break;
    }
  }

  Eigen::MatrixXd cov = v * cov_z * v.transpose();
  s.cov_beta = 0.5 * (cov + cov.transpose());
  for (Index i = 0; i < k; ++i) {
    const double scale = std::max(1.0, s.cov_beta.diagonal().cwiseAbs().maxCoeff());
    if (s.cov_beta(i, i) < -1e-12 * scale) {
      throw Error(ErrorCode::numerical_failure, "negative posterior variance for beta_" +
                                                    std::to_string(i));
    }
  }
  return s;
}

}  // namespace nnpost
