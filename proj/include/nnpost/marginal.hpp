#ifndef NNPOST_MARGINAL_HPP
#define NNPOST_MARGINAL_HPP

#include <memory>
#include <span>

#include "nnpost/svd_basis.hpp"

namespace nnpost {

/// Coefficients of the diagonal quadratic form in z at fixed (sigma1, sigma2):
///   -|X beta - y|^2/(2 sigma2^2) - |beta|^2/(2 sigma1^2)
///     = a0 + sum_i [ a1_i^2/(4 a2_i) - a2_i (z_i - a1_i/(2 a2_i))^2 ].
struct QuadraticCoeffs {
  double a0 = 0.0;
  Eigen::VectorXd a1;
  Eigen::VectorXd a2;
};

/// Distribution of z given (sigma1, sigma2): independent normals with
/// mean_i = a1_i/(2 a2_i) and variance_i = 1/(2 a2_i).
struct ConditionalGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// The density over (sigma1, sigma2) left after integrating beta out
/// analytically. Immutable; every member function is safe to call
/// concurrently.
class MarginalModel {
 public:
  MarginalModel(std::shared_ptr<const SvdBasis> basis, double gamma);
  MarginalModel(SvdBasis basis, double gamma);

  const SvdBasis& basis() const { return *basis_; }
  std::shared_ptr<const SvdBasis> shared_basis() const { return basis_; }
  double gamma() const { return gamma_; }
  Index k() const { return basis_->k(); }
  Index n() const { return basis_->n(); }

  QuadraticCoeffs coeffs(double sigma1, double sigma2) const;

  /// log q~(sigma1, sigma2), including the (2 pi)^(k/2) factor so that it
  /// equals the log of the beta-integral of q exactly. O(k).
  double log_qtilde(double sigma1, double sigma2) const;

  ConditionalGaussian conditional_z(double sigma1, double sigma2) const;

  /// Allocation-free variant; both spans must have length k.
  void conditional_z(double sigma1, double sigma2, std::span<double> mean,
                     std::span<double> variance) const;

 private:
  std::shared_ptr<const SvdBasis> basis_;
  double gamma_;
  Eigen::VectorXd lambda_sq_;
  Eigen::VectorXd w_sq_;
};

}  // namespace nnpost

#endif  // NNPOST_MARGINAL_HPP
