#include <cmath>
#include <limits>

#include "doctest.h"
#include "nnpost/error.hpp"
#include "nnpost/model.hpp"
#include "support.hpp"

using namespace nnpost;

namespace {

ErrorCode code_of(const RegressionData& d) {
  try {
    validate(d);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("validate accepted bad input");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("validate accepts the minimal instance") {
  RegressionData d{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Constant(1, 2.0)};
  CHECK(&validate(d) == &d);
}

TEST_CASE("validate rejects malformed data") {
  SUBCASE("length mismatch") {
    RegressionData d{Eigen::MatrixXd::Ones(3, 2), Eigen::VectorXd::Ones(2)};
    CHECK(code_of(d) == ErrorCode::dimension_mismatch);
  }
  SUBCASE("non-finite entry names its location") {
    RegressionData d{Eigen::MatrixXd::Ones(3, 2), Eigen::VectorXd::Ones(3)};
    d.x(2, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of(d) == ErrorCode::non_finite);
    try {
      validate(d);
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 3") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }
  SUBCASE("infinite response") {
    RegressionData d{Eigen::MatrixXd::Ones(2, 1), Eigen::VectorXd::Ones(2)};
    d.y(0) = std::numeric_limits<double>::infinity();
    CHECK(code_of(d) == ErrorCode::non_finite);
  }
  SUBCASE("empty") {
    RegressionData d{Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)};
    CHECK(code_of(d) == ErrorCode::empty_input);
    RegressionData e{Eigen::MatrixXd(3, 0), Eigen::VectorXd::Ones(3)};
    CHECK(code_of(e) == ErrorCode::empty_input);
  }
}

TEST_CASE("hyperparameter validation") {
  Hyperparams h;
  CHECK_NOTHROW(h.validate());
  CHECK(h.gamma == 8.0);
  CHECK(h.grid_nodes == 200);
  CHECK(h.tail_drop == 46.0);
  CHECK(h.sigma_floor == 1e-8);
  for (auto mutate : {+[](Hyperparams& p) { p.gamma = 0.0; }, +[](Hyperparams& p) { p.grid_nodes = 1; },
                      +[](Hyperparams& p) { p.tail_drop = -1.0; },
                      +[](Hyperparams& p) { p.sigma_floor = 0.0; },
                      +[](Hyperparams& p) { p.gamma = std::nan(""); }}) {
    Hyperparams bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), Error);
  }
}

TEST_CASE("synthetic data is seeded and reproducible") {
  const auto a = generate_synthetic(5, 2, 7);
  const auto b = generate_synthetic(5, 2, 7);
  CHECK(a.data.x == b.data.x);
  CHECK(a.data.y == b.data.y);
  CHECK(a.beta_true == b.beta_true);
  const auto c = generate_synthetic(5, 2, 8);
  CHECK(a.data.x != c.data.x);
}

TEST_CASE("synthetic data consumes X, then beta, then noise from one stream") {
  const auto s = generate_synthetic(4, 3, 21);
  Rng rng(21);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) REQUIRE(s.data.x(i, j) == rng.normal());
  for (Index j = 0; j < 3; ++j) REQUIRE(s.beta_true(j) == rng.normal());
  const Eigen::VectorXd fitted = s.data.x * s.beta_true;
  for (Index i = 0; i < 4; ++i) CHECK(s.data.y(i) == doctest::Approx(fitted(i) + rng.normal()).epsilon(1e-15));
}

TEST_CASE("column means of a large synthetic X are near zero") {
  const auto s = generate_synthetic(10000, 100, 1);
  const double bound = 5.0 / std::sqrt(10000.0);
  CHECK(s.data.x.colwise().mean().cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("synthetic noise level") {
  const auto s = generate_synthetic(100, 10, 3);
  const double mse = (s.data.y - s.data.x * s.beta_true).squaredNorm() / 100.0;
  CHECK(mse >= 0.5);
  CHECK(mse <= 1.7);
}

TEST_CASE("property: generated data always validates") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = test::uniform_int(rng, 1, 40);
    const Index k = test::uniform_int(rng, 1, 40);
    const auto s = generate_synthetic(n, k, rng.next_u64());
    CHECK_NOTHROW(validate(s.data));
    CHECK(s.data.n() == n);
    CHECK(s.data.k() == k);
  }
  CHECK_THROWS_AS(generate_synthetic(0, 3, 1), Error);
  CHECK_THROWS_AS(generate_synthetic(3, 0, 1), Error);
}

TEST_CASE("rng streams") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) REQUIRE(a.normal() == b.normal());
  Rng r(17);
  double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / count) < 5.0 / std::sqrt(double(count)));
  CHECK(std::abs(sq / count - 1.0) < 0.02);
}
