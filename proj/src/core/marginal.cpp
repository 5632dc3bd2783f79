#include "nnpost/marginal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nnpost/error.hpp"

namespace nnpost {

namespace {

void check_sigmas(double sigma1, double sigma2) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::invalid_argument, "sigma1 and sigma2 must be positive and finite (got " +
                                                 std::to_string(sigma1) + ", " +
                                                 std::to_string(sigma2) + ")");
  }
}

}  // namespace

MarginalModel::MarginalModel(std::shared_ptr<const SvdBasis> basis, double gamma)
    : basis_(std::move(basis)), gamma_(gamma) {
  if (!basis_) throw Error(ErrorCode::invalid_argument, "null basis");
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw Error(ErrorCode::invalid_argument, "gamma must be positive and finite");
  }
  lambda_sq_ = basis_->lambda().array().square();
  w_sq_ = basis_->w().array().square();
}

MarginalModel::MarginalModel(SvdBasis basis, double gamma)
    : MarginalModel(std::make_shared<const SvdBasis>(std::move(basis)), gamma) {}

QuadraticCoeffs MarginalModel::coeffs(double sigma1, double sigma2) const {
  check_sigmas(sigma1, sigma2);
  const double s1sq = sigma1 * sigma1;
  const double s2sq = sigma2 * sigma2;
  QuadraticCoeffs c;
  c.a2 = lambda_sq_.array() / (2.0 * s2sq) + 1.0 / (2.0 * s1sq);
  c.a1 = basis_->w() / s2sq;
  c.a0 = -basis_->yty() / (2.0 * s2sq);
  return c;
}

double MarginalModel::log_qtilde(double sigma1, double sigma2) const {
  check_sigmas(sigma1, sigma2);
  const double inv1 = 1.0 / (sigma1 * sigma1);
  const double inv2 = 1.0 / (sigma2 * sigma2);
  const Index k = lambda_sq_.size();
  const double* lam = lambda_sq_.data();
  const double* wsq = w_sq_.data();

  // With b_i = 2 a2_i: quad = sum w_i^2 / b_i, and sum log b_i is taken as
  // log of a mantissa product plus a binary exponent so only one log is
  // evaluated per call. Products run over blocks of 8 and are renormalized
  // once per block; a block that leaves the normal range is redone termwise.
  constexpr Index kBlock = 8;
  double quad = 0.0;
  double mantissa = 1.0;
  long exponent = 0;
  auto absorb = [&](double v) {
    int e = 0;
    mantissa *= std::frexp(v, &e);
    exponent += e;
    mantissa = std::frexp(mantissa, &e);
    exponent += e;
  };
  Index i = 0;
  for (; i + kBlock <= k; i += kBlock) {
    double prod = 1.0;
    for (Index j = i; j < i + kBlock; ++j) {
      const double b = lam[j] * inv2 + inv1;
      quad += wsq[j] / b;
      prod *= b;
    }
    if (std::isnormal(prod)) {
      absorb(prod);
    } else {
      for (Index j = i; j < i + kBlock; ++j) absorb(lam[j] * inv2 + inv1);
    }
  }
  for (; i < k; ++i) {
    const double b = lam[i] * inv2 + inv1;
    quad += wsq[i] / b;
    absorb(b);
  }
  const double log_b_sum = std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;

  const double ls1 = std::log(sigma1);
  const double ls2 = std::log(sigma2);
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(basis_->n());
  constexpr double log_2pi = 1.8378770664093454835606594728112;
  return -(kd + 1.0) * ls1 - nd * ls2 - gamma_ * ls1 * ls1 - 0.5 * sigma2 * sigma2 -
         0.5 * basis_->yty() * inv2 + 0.5 * quad * inv2 * inv2 + 0.5 * kd * log_2pi -
         0.5 * log_b_sum;
}

ConditionalGaussian MarginalModel::conditional_z(double sigma1, double sigma2) const {
  ConditionalGaussian g;
  g.mean.resize(k());
  g.variance.resize(k());
  conditional_z(sigma1, sigma2, std::span<double>(g.mean.data(), g.mean.size()),
                std::span<double>(g.variance.data(), g.variance.size()));
  return g;
}

void MarginalModel::conditional_z(double sigma1, double sigma2, std::span<double> mean,
                                  std::span<double> variance) const {
  check_sigmas(sigma1, sigma2);
  const Index k = lambda_sq_.size();
  if (static_cast<Index>(mean.size()) != k || static_cast<Index>(variance.size()) != k) {
    throw Error(ErrorCode::dimension_mismatch, "conditional_z output spans must have length k");
  }
  const double inv1 = 1.0 / (sigma1 * sigma1);
  const double inv2 = 1.0 / (sigma2 * sigma2);
  const double* lam = lambda_sq_.data();
  const double* w = basis_->w().data();
  for (Index i = 0; i < k; ++i) {
    const double v = 1.0 / (lam[i] * inv2 + inv1);
    variance[i] = v;
    mean[i] = w[i] * inv2 * v;
  }
}

}  // namespace nnpost
