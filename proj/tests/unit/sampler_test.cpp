#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "nnpost/error.hpp"
#include "nnpost/oracle.hpp"
#include "nnpost/pipeline.hpp"
#include "nnpost/sampler.hpp"
#include "support.hpp"

using namespace nnpost;

namespace {

std::vector<double> column(const std::vector<std::array<double, 2>>& draws, int c) {
  std::vector<double> out(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) out[i] = draws[i][c];
  return out;
}

std::vector<double> column(const Eigen::MatrixXd& m, Index c) {
  return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
}

double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

// Two-sided Kolmogorov-Smirnov p-value against N(0, 1), asymptotic form.
double ks_normal_pvalue(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    p += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST_CASE("standard normal stub target") {
  SamplerConfig c;
  c.draws = 50000;
  c.seed = 42;
  const auto trace = run_metropolis(
      [](const std::array<double, 2>& u) { return -0.5 * (u[0] * u[0] + u[1] * u[1]); }, {0.0, 0.0}, c);
  REQUIRE(trace.draws.size() == 50000);
  CHECK(trace.acceptance_rate == doctest::Approx(trace.accepted / 50000.0));
  CHECK(trace.acceptance_rate >= 0.2);
  CHECK(trace.acceptance_rate <= 0.5);
  for (int axis = 0; axis < 2; ++axis) {
    const auto xs = column(trace.draws, axis);
    const auto est = batch_means(xs);
    MESSAGE("axis ", axis, ": mean ", est.mean, ", mcse ", est.mcse, ", iid bound ",
            3.0 / std::sqrt(50000.0));
    // Autocorrelated draws: the Monte Carlo error is judged against the
    // batch-means standard error rather than the iid 1/sqrt(draws).
    CHECK(std::abs(est.mean) <= 3.0 * est.mcse);
    CHECK(std::abs(sample_variance(xs) - 1.0) <= 0.1);
  }
}

TEST_CASE("seeded determinism and frozen adaptation") {
  const auto model = MarginalModel(factorize(generate_synthetic(60, 4, 2).data), 8.0);
  SamplerConfig c;
  c.draws = 3000;
  c.seed = 9;
  const auto a = run_chain(model, c);
  const auto b = run_chain(model, c);
  CHECK(a.sigma1 == b.sigma1);
  CHECK(a.sigma2 == b.sigma2);
  CHECK(draw_beta(model, a, 4) == draw_beta(model, b, 4));

  // Measured draws never feed back into the proposal: a longer run starts
  // with exactly the shorter run.
  SamplerConfig longer = c;
  longer.draws = 6000;
  const auto l = run_chain(model, longer);
  CHECK(std::equal(a.sigma1.begin(), a.sigma1.end(), l.sigma1.begin()));
  CHECK(l.step_scale == a.step_scale);

  for (double s : a.sigma1) REQUIRE(s > 0.0);
  for (double s : a.sigma2) REQUIRE(s > 0.0);
  CHECK(a.acceptance_rate == doctest::Approx(static_cast<double>(a.accepted) / 3000.0));
}

TEST_CASE("chain moments agree with quadrature") {
  const auto data = generate_synthetic(200, 10, 4).data;
  const auto basis = std::make_shared<const SvdBasis>(factorize(data));
  const auto q = fit(basis, FitOptions{}).summary;
  const MarginalModel model(basis, 8.0);
  SamplerConfig c;
  c.seed = 17;
  auto chain = run_chain(model, c);
  chain.beta = draw_beta(model, chain, 18);
  const auto e1 = batch_means(chain.sigma1), e2 = batch_means(chain.sigma2);
  CHECK(std::abs(e1.mean - q.mean_sigma1) <= std::max(3.0 * e1.mcse, 1e-2));
  CHECK(std::abs(e2.mean - q.mean_sigma2) <= std::max(3.0 * e2.mcse, 1e-2));
  for (Index i = 0; i < 10; ++i) {
    const auto e = batch_means(column(chain.beta, i));
    CHECK(std::abs(e.mean - q.mean_beta(i)) <= std::max(3.0 * e.mcse, 1e-2));
  }
}

TEST_CASE("beta draws for a zero response are centred") {
  Rng rng(8);
  // n <= k: the posterior is proper for y = 0.
  const RegressionData d{test::gaussian_matrix(rng, 3, 3), Eigen::VectorXd::Zero(3)};
  const MarginalModel model(factorize(d), 8.0);
  SamplerConfig c;
  c.seed = 3;
  auto chain = run_chain(model, c);
  const auto beta = draw_beta(model, chain, 5);
  for (Index i = 0; i < 3; ++i) {
    const auto e = batch_means(column(beta, i));
    CHECK(std::abs(e.mean) <= 3.0 * e.mcse);
  }
}

TEST_CASE("beta draws reproduce the oracle covariance") {
  const auto data = generate_synthetic(8, 2, 31).data;
  const auto truth = oracle::brute_moments(data, 8.0);
  const MarginalModel model(factorize(data), 8.0);
  SamplerConfig c;
  c.draws = 20000;
  c.seed = 6;
  const auto chain = run_chain(model, c);
  const auto beta = draw_beta(model, chain, 7);
  for (Index a = 0; a < 2; ++a) {
    for (Index b = a; b < 2; ++b) {
      std::vector<double> prod(beta.rows());
      for (Index r = 0; r < beta.rows(); ++r) {
        prod[r] = (beta(r, a) - truth.mean_beta(a)) * (beta(r, b) - truth.mean_beta(b));
      }
      const auto e = batch_means(prod);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::abs(e.mean - truth.cov_beta(a, b)) <= 3.0 * e.mcse);
    }
  }
}

TEST_CASE("studentized beta draws are standard normal") {
  const auto data = generate_synthetic(50, 3, 12).data;
  const MarginalModel model(factorize(data), 8.0);
  SamplerConfig c;
  c.seed = 1;
  const auto chain = run_chain(model, c);
  const auto beta = draw_beta(model, chain, 2);
  const Eigen::MatrixXd z = beta * model.basis().v();
  for (Index i = 0; i < 3; ++i) {
    std::vector<double> r(chain.size());
    for (std::size_t d = 0; d < chain.size(); ++d) {
      const auto g = model.conditional_z(chain.sigma1[d], chain.sigma2[d]);
      r[d] = (z(static_cast<Index>(d), i) - g.mean(i)) / std::sqrt(g.variance(i));
    }
    CHECK(ks_normal_pvalue(r) > 0.001);
  }
}

TEST_CASE("sampler failures and validation") {
  SamplerConfig c;
  c.draws = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.draws = 10;
  c.step_scale = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);

  SamplerConfig ok;
  ok.draws = 200;
  ok.warmup = 0;
  auto spike = [](const std::array<double, 2>& u) {
    return (u[0] == 0.0 && u[1] == 0.0) ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  try {
    run_metropolis(spike, {0.0, 0.0}, ok);
    FAIL("expected sampler failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sampler_failure);
  }
  CHECK_THROWS_AS(run_metropolis(spike, {1.0, 0.0}, ok), Error);
  CHECK_THROWS_AS(run_metropolis([](const std::array<double, 2>&) { return std::nan(""); }, {0.0, 0.0}, ok),
                  Error);
}

TEST_CASE("batch means") {
  const std::vector<double> flat(100, 2.5);
  const auto e = batch_means(flat);
  CHECK(e.mean == 2.5);
  CHECK(e.mcse == 0.0);
  std::vector<double> alternating(400);
  for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = (i / 20) % 2 ? 1.0 : -1.0;
  const auto a = batch_means(alternating);
  CHECK(a.mean == doctest::Approx(0.0));
  CHECK(a.mcse == doctest::Approx(std::sqrt(1.0 / 19.0)).epsilon(1e-12));
  CHECK(std::isnan(batch_means(std::vector<double>{1.0, 2.0, 3.0}).mcse));
  CHECK_THROWS_AS(batch_means(std::vector<double>{}), Error);
}
