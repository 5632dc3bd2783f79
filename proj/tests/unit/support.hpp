#ifndef NNPOST_TESTS_SUPPORT_HPP
#define NNPOST_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>

#include "nnpost/model.hpp"
#include "nnpost/random.hpp"

namespace nnpost::test {

// Hand-rolled generators for property tests.
inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Index rows, Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Eigen::VectorXd gaussian_vector(Rng& rng, Index size) {
  Eigen::VectorXd v(size);
  for (Index i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

// Random regression instance with column scales spread over two decades.
inline RegressionData random_data(Rng& rng, Index n, Index k) {
  RegressionData d{gaussian_matrix(rng, n, k), gaussian_vector(rng, n)};
  for (Index j = 0; j < k; ++j) d.x.col(j) *= std::exp(uniform_real(rng, -1.0, 1.0));
  return d;
}

// |got - want| within rel * |want|, or within abs when |want| < cutoff.
inline bool close(double got, double want, double rel, double abs = 0.0, double cutoff = 0.0) {
  const double err = std::abs(got - want);
  if (std::abs(want) < cutoff) return err <= abs;
  return err <= rel * std::abs(want);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace nnpost::test

#endif  // NNPOST_TESTS_SUPPORT_HPP
