#include "rwrt/random.hpp"
#include "rwrt/stats.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace rwrt;

namespace {

Matrix fbm_ensemble(double hurst, Index paths, Index steps, std::uint64_t seed) {
  const TimeGrid grid = TimeGrid::unit(steps);
  Matrix out(paths, grid.points());
  for (Index r = 0; r < paths; ++r) {
    RandomStream s = RandomStream(seed).child("p", static_cast<std::uint64_t>(r));
    out.row(r) = gen_fbm_path(hurst, grid, s).values.transpose();
  }
  return out;
}

}  // namespace

TEST_CASE("Hurst estimate of linear paths is exactly one") {
  const TimeGrid grid = TimeGrid::unit(64);
  Matrix ens(200, grid.points());
  RandomStream s(1);
  for (Index r = 0; r < ens.rows(); ++r) ens.row(r) = (s.normal() + 3.0) * grid.times().transpose();
  const HurstReport h = estimate_hurst(ens, grid);
  CHECK(std::abs(h.estimate - 1.0) < 1e-12);
  CHECK(h.stderr_ >= 1e-12);
  CHECK(h.scales.size() == 7);
}

TEST_CASE("Hurst estimate of fBm") {
  const TimeGrid grid = TimeGrid::unit(1 << 12);
  for (const double hurst : {0.5, 0.25}) {
    const HurstReport h = estimate_hurst(fbm_ensemble(hurst, 1000, 1 << 12, 2), grid);
    CAPTURE(hurst);
    CHECK(std::abs(h.estimate - hurst) < 0.03);
  }
}

TEST_CASE("Hurst estimate is scale invariant") {
  const TimeGrid grid = TimeGrid::unit(256);
  const Matrix ens = fbm_ensemble(0.7, 300, 256, 3);
  const HurstReport a = estimate_hurst(ens, grid);
  const HurstReport b = estimate_hurst(17.5 * ens, grid);
  CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
}

TEST_CASE("degenerate Hurst inputs") {
  const TimeGrid grid = TimeGrid::unit(16);
  CHECK_THROWS_AS(estimate_hurst(Matrix::Zero(200, 17), grid), EstimationError);
  CHECK_THROWS_AS(estimate_hurst(Matrix::Ones(50, 17), grid), ParameterError);
  CHECK_THROWS_AS(estimate_hurst(Matrix::Ones(200, 16), grid), ParameterError);
  CHECK_THROWS_AS(estimate_hurst(Matrix::Ones(200, 17), grid, 8), ParameterError);  // too few scales
}

TEST_CASE("ecf") {
  const Vector theta = theta_grid(-2.0, 2.0, 5);
  CHECK(theta[2] == 0.0);
  CHECK(ecf(Vector::Zero(10), theta).value.isOnes());
  const Vector pm{{1.0, -1.0, 1.0, -1.0}};
  const EcfReport e = ecf(pm, theta);
  for (Index k = 0; k < theta.size(); ++k) {
    CHECK(e.value[k] == doctest::Approx(std::cos(theta[k])));
    CHECK(e.stderr_[k] == doctest::Approx(0.0));
  }
  Matrix cond(3, theta.size());
  for (Index k = 0; k < theta.size(); ++k) cond.col(k).setConstant(std::exp(-theta[k] * theta[k]));
  const EcfReport c = ecf_from_conditional(cond, theta);
  CHECK(c.value[0] == doctest::Approx(std::exp(-4.0)));
  CHECK(ecf_distance(c, c) == 0.0);
  CHECK(ecf_distance(e, c) == doctest::Approx((e.value - c.value).cwiseAbs().maxCoeff()));
  CHECK_THROWS_AS(ecf_distance(e, ecf(pm, theta_grid(0.0, 1.0, 5))), ParameterError);
  CHECK(theta_grid(1.5, 3.0, 1)[0] == 1.5);
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_survival(10.0) < 1e-40);
}

TEST_CASE("KS tests") {
  const Vector a = Vector::LinSpaced(100, 0.0, 1.0);
  const KsResult same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  const KsResult apart = ks_two_sample(a, a.array() + 2.0);
  CHECK(apart.statistic == doctest::Approx(1.0));
  CHECK(apart.p_value < 1e-10);
  CHECK(apart.n1 == 100);

  const Vector grid = (Vector::LinSpaced(1000, 0.0, 999.0).array() + 0.5) / 1000.0;
  const KsResult uni = ks_one_sample(grid, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(uni.statistic == doctest::Approx(0.0005));
  CHECK(uni.p_value > 0.99);

  RandomStream s(4);
  Vector z(5000);
  for (Index i = 0; i < z.size(); ++i) z[i] = s.normal();
  CHECK(ks_one_sample(z, [](double x) { return normal_cdf(x); }).p_value > 0.01);
  CHECK(ks_one_sample(z, [](double x) { return normal_cdf(x, 1.5); }).p_value < 0.01);
  CHECK_THROWS_AS(ks_two_sample(Vector(), a), ParameterError);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_cdf(std::sqrt(2.0), 2.0) == doctest::Approx(normal_cdf(1.0)));
}

TEST_CASE("covariance with brute-force jackknife") {
  RandomStream s(5);
  Matrix x(60, 3);
  for (Index r = 0; r < x.rows(); ++r) {
    const double a = s.normal();
    x(r, 0) = a;
    x(r, 1) = 0.5 * a + s.normal();
    x(r, 2) = s.exponential();
  }
  const auto cov_of = [](const Matrix& m, Index i, Index j) {
    const double mi = m.col(i).mean();
    const double mj = m.col(j).mean();
    return ((m.col(i).array() - mi) * (m.col(j).array() - mj)).sum() / static_cast<double>(m.rows() - 1);
  };
  const CovarianceReport rep = cov_matrix(x);
  const Index n = x.rows();
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      CHECK(rep.cov(i, j) == doctest::Approx(cov_of(x, i, j)).epsilon(1e-12));
      Vector loo(n);
      for (Index d = 0; d < n; ++d) {
        Matrix sub(n - 1, 3);
        sub << x.topRows(d), x.bottomRows(n - d - 1);
        loo[d] = cov_of(sub, i, j);
      }
      const double jk = std::sqrt((n - 1.0) / n * (loo.array() - loo.mean()).square().sum());
      CHECK(rep.stderr_(i, j) == doctest::Approx(jk).epsilon(1e-9));
    }
  }
  const std::array<Index, 2> cols{2, 0};
  const CovarianceReport sub = cov_matrix(x, cols);
  CHECK(sub.cov(0, 1) == doctest::Approx(rep.cov(2, 0)));
  CHECK_THROWS_AS(cov_matrix(Matrix::Ones(2, 2)), ParameterError);
}

TEST_CASE("mean with stderr") {
  const Vector v{{1.0, 2.0, 3.0, 4.0}};
  const auto e = mean_with_stderr(v);
  CHECK(e.mean == 2.5);
  CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK_THROWS_AS(mean_with_stderr(Vector::Ones(1)), ParameterError);
}
