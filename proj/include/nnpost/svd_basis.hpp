#ifndef NNPOST_SVD_BASIS_HPP
#define NNPOST_SVD_BASIS_HPP

#include "nnpost/model.hpp"

namespace nnpost {

/// Right singular basis of X together with the two data summaries the
/// marginal density needs: w = V^t X^t y and y^t y.
///
/// V is always the full k x k orthogonal factor. When n < k the trailing
/// k - n singular values are exactly zero and the corresponding entries of w
/// are exactly zero. Each column of V is sign-normalized so that its
/// largest-magnitude entry is positive.
class SvdBasis {
 public:
  /// Assembles a basis from precomputed parts. Checks dimensions,
  /// orthogonality of V (1e-12) and nonnegativity of lambda and yty; does
  /// not re-normalize signs.
  static SvdBasis from_parts(Eigen::MatrixXd v, Eigen::VectorXd lambda,
                             Eigen::VectorXd w, double yty, Index n);

  const Eigen::MatrixXd& v() const { return v_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  const Eigen::VectorXd& w() const { return w_; }
  double yty() const { return yty_; }
  Index n() const { return n_; }
  Index k() const { return v_.cols(); }

 private:
  SvdBasis() = default;

  Eigen::MatrixXd v_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd w_;
  double yty_ = 0.0;
  Index n_ = 0;

  friend SvdBasis factorize(const RegressionData& data);
};

/// Validates `data`, computes its SVD and the derived vector w.
SvdBasis factorize(const RegressionData& data);

/// z = V^t beta.
Eigen::VectorXd to_z(const SvdBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& beta);

/// beta = V z.
Eigen::VectorXd from_z(const SvdBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& z);

}  // namespace nnpost

#endif  // NNPOST_SVD_BASIS_HPP
