#include "nnpost/svd_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnpost/error.hpp"

namespace nnpost {

namespace {

void check_length(const SvdBasis& basis, Index length, const char* what) {
  if (length != basis.k()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + " has length " +
                                                   std::to_string(length) + ", expected " +
                                                   std::to_string(basis.k()));
  }
}

// Flip each column so its largest-magnitude entry is positive; ties resolve
// to the first such entry.
void normalize_signs(Eigen::MatrixXd& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index arg = 0;
    v.col(j).cwiseAbs().maxCoeff(&arg);
    if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
  }
}

Eigen::MatrixXd right_singular_vectors(const Eigen::MatrixXd& x, Eigen::VectorXd& singular) {
  const Index n = x.rows();
  const Index k = x.cols();
  auto run = [&singular](const Eigen::MatrixXd& a) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
      throw Error(ErrorCode::svd_failure,
                  "SVD did not converge on a " + std::to_string(a.rows()) + " x " +
                      std::to_string(a.cols()) + " matrix");
    }
    singular = svd.singularValues();
    return Eigen::MatrixXd(svd.matrixV());
  };
  if (n > k) {
    // Reduce tall X to its k x k triangular factor; R has the same right
    // singular vectors and singular values as X.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return run(r);
  }
  return run(x);
}

}  // namespace

SvdBasis SvdBasis::from_parts(Eigen::MatrixXd v, Eigen::VectorXd lambda, Eigen::VectorXd w,
                              double yty, Index n) {
  const Index k = v.cols();
  if (k == 0 || v.rows() != k || lambda.size() != k || w.size() != k) {
    throw Error(ErrorCode::dimension_mismatch, "basis parts must be k x k, k, k");
  }
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be positive");
  if (!v.allFinite() || !lambda.allFinite() || !w.allFinite() || !std::isfinite(yty)) {
    throw Error(ErrorCode::non_finite, "basis parts contain non-finite values");
  }
  if ((lambda.array() < 0.0).any() || yty < 0.0) {
    throw Error(ErrorCode::invalid_argument, "singular values and yty must be nonnegative");
  }
  const double ortho = (v.transpose() * v - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  if (ortho > 1e-12) {
    throw Error(ErrorCode::invalid_argument,
                "V is not orthogonal (max |V^tV - I| = " + std::to_string(ortho) + ")");
  }
  SvdBasis basis;
  basis.v_ = std::move(v);
  basis.lambda_ = std::move(lambda);
  basis.w_ = std::move(w);
  basis.yty_ = yty;
  basis.n_ = n;
  return basis;
}

SvdBasis factorize(const RegressionData& data) {
  validate(data);
  const Index n = data.n();
  const Index k = data.k();
  const Index rank_slots = std::min(n, k);

  Eigen::VectorXd singular;
  Eigen::MatrixXd v = right_singular_vectors(data.x, singular);
  if (!v.allFinite() || !singular.allFinite()) {
    throw Error(ErrorCode::svd_failure, "SVD produced non-finite factors");
  }
  normalize_signs(v);

  SvdBasis basis;
  basis.lambda_ = Eigen::VectorXd::Zero(k);
  basis.lambda_.head(rank_slots) = singular.head(rank_slots);
  basis.w_ = v.transpose() * (data.x.transpose() * data.y);
  // Trailing columns span the null space of X, where w vanishes exactly.
  basis.w_.tail(k - rank_slots).setZero();
  basis.yty_ = data.y.squaredNorm();
  basis.n_ = n;
  basis.v_ = std::move(v);
  return basis;
}

Eigen::VectorXd to_z(const SvdBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& beta) {
  check_length(basis, beta.size(), "beta");
  return basis.v().transpose() * beta;
}

Eigen::VectorXd from_z(const SvdBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& z) {
  check_length(basis, z.size(), "z");
  return basis.v() * z;
}

}  // namespace nnpost
