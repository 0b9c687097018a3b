#include "rwrt/recursion.hpp"
#include "rwrt/stats.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace rwrt;

namespace {

const double kRootTwoOverPi = std::sqrt(2.0 / std::numbers::pi);

double times_cov(double s, double t) {
  return kRootTwoOverPi * (std::sqrt(s) + std::sqrt(t) - std::sqrt(std::abs(t - s)));
}

}  // namespace

TEST_CASE("phi and composition") {
  CHECK(phi(Symbol::plus, 0.5, 2.0) == doctest::Approx(0.75));
  CHECK(phi(Symbol::star, 0.5, 2.0) == doctest::Approx(0.75));
  CHECK(phi(Symbol::minus, 0.5, 2.0) == doctest::Approx(0.25));
  CHECK(phi(Symbol::times, 0.6, 1.5) == doctest::Approx(0.4));
  CHECK(compose_hurst(RecursionWord::parse("x,x"), 0.5, 2.0) == doctest::Approx(0.125));
  CHECK(compose_hurst(RecursionWord::parse("+-"), 0.5, 2.0) == doctest::Approx(0.375));
  CHECK(compose_hurst(RecursionWord{}, 0.3, 2.0) == 0.3);
  // phi_+ has the fixed point alpha / (2 alpha - 1)
  const double fixed = 1.5 / 2.0;
  CHECK(phi(Symbol::plus, fixed, 1.5) == doctest::Approx(fixed));
  CHECK_THROWS_AS(phi(Symbol::plus, 1.0, 2.0), ParameterError);
  CHECK_THROWS_AS(phi(Symbol::plus, 0.5, 1.0), ParameterError);
}

TEST_CASE("word parsing") {
  const RecursionWord w = RecursionWord::parse("xx*");
  REQUIRE(w.size() == 3);
  CHECK(w.symbols[0] == Symbol::times);
  CHECK(w.symbols[2] == Symbol::star);
  CHECK(w.str() == "x,x,*");
  CHECK(RecursionWord::parse("plus, minus").str() == "+,-");
  CHECK(RecursionWord::parse(w.str()).symbols == w.symbols);
  CHECK(RecursionWord::parse("").size() == 0);
  CHECK_THROWS_AS(RecursionWord::parse("x,y"), ParameterError);
  CHECK(uses_local_time(Symbol::star));
  CHECK_FALSE(uses_local_time(Symbol::times));
  CHECK(uses_product_measure(Symbol::times));
  CHECK_FALSE(uses_product_measure(Symbol::minus));
}

TEST_CASE("hurst bookkeeping along a word") {
  RecursionState s = RecursionState::fbm(1.5, 0.6, TimeGrid::unit(8));
  const RecursionWord word = RecursionWord::parse("+,x,-");
  for (const Symbol sym : word.symbols) s = recurse_step(s, sym, 2, 1.0 / 16.0);
  CHECK(s.hurst == doctest::Approx(compose_hurst(word, 0.6, 1.5)));
  CHECK(s.word.str() == "+,x,-");
  RandomStream r(1);
  const Vector v = s.sample(r);
  CHECK(v.size() == 9);
  CHECK(v[0] == 0.0);
  CHECK(v.allFinite());
  CHECK_THROWS_AS(recurse_step(s, Symbol::plus, 0, 0.1), ParameterError);
}

TEST_CASE("ensembles are reproducible") {
  const RecursionState s = recurse_step(RecursionState::fbm(2.0, 0.5, TimeGrid::unit(4)), Symbol::times, 4, 0.1);
  const Matrix a = s.ensemble(5, RandomStream(2));
  const Matrix b = s.ensemble(5, RandomStream(2));
  CHECK(a == b);
  CHECK(a.col(0).isZero());
}

TEST_CASE("times covariance target") {
  // oracle: Cov = 2 E|[0, Y_s] cap [0, Y_t]| = 4 E min(Y_s, Y_t)^+ by direct sampling
  const double s = 0.25;
  const double t = 1.0;
  RandomStream r(3);
  Vector m(1000000);
  for (Index i = 0; i < m.size(); ++i) {
    const double ys = std::sqrt(s) * r.normal();
    const double yt = ys + std::sqrt(t - s) * r.normal();
    m[i] = 4.0 * std::max(0.0, std::min(ys, yt));
  }
  const auto e = mean_with_stderr(m);
  CHECK(std::abs(e.mean - times_cov(s, t)) <= 3.0 * e.stderr_);
}

TEST_CASE("level-1 times covariance") {
  const RecursionState x = recurse_step(RecursionState::fbm(2.0, 0.5, TimeGrid::unit(4)), Symbol::times, 32, 1.0 / 64.0);
  const Matrix ens = x.ensemble(4000, RandomStream(4));
  const std::array<Index, 2> cols{1, 4};
  const CovarianceReport c = cov_matrix(ens, cols);
  for (const auto& [i, j] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
    const double target = times_cov(0.25 * static_cast<double>(cols[i]), 0.25 * static_cast<double>(cols[j]));
    CAPTURE(i);
    CAPTURE(j);
    CHECK(std::abs(c.cov(i, j) - target) <= 3.0 * c.stderr_(i, j));
  }
}

TEST_CASE("level-1 minus from Brownian motion") {
  // cf of Delta_1 given Y_1 is exp(-theta^2 |Y_1|); closed form of its mean
  const RecursionState x = recurse_step(RecursionState::fbm(2.0, 0.5, TimeGrid::unit(1)), Symbol::minus, 1, 1.0 / 128.0);
  const Matrix ens = x.ensemble(20000, RandomStream(5));
  const Vector theta = theta_grid(0.25, 2.0, 8);
  const EcfReport e = ecf(ens.col(1), theta);
  for (Index k = 0; k < theta.size(); ++k) {
    const double q = theta[k] * theta[k];
    const double exact = std::exp(0.5 * q * q) * std::erfc(q / std::numbers::sqrt2);
    CAPTURE(theta[k]);
    CHECK(std::abs(e.value[k] - exact) <= 3.5 * e.stderr_[k] + 2e-3);
  }
}

TEST_CASE("times levels 1 and 2 are Gaussian") {
  const RecursionState base = RecursionState::fbm(2.0, 0.5, TimeGrid::unit(1));
  SUBCASE("level 1") {
    const RecursionState x = recurse_step(base, Symbol::times, 64, 1.0 / 64.0);
    const Vector v = x.ensemble(2000, RandomStream(6)).col(1);
    const double var = 2.0 * kRootTwoOverPi;
    CHECK(ks_one_sample(v, [var](double z) { return normal_cdf(z, var); }).p_value > 0.01);
  }
  SUBCASE("level 2") {
    const RecursionState x = recurse_step(recurse_step(base, Symbol::times, 16, 1.0 / 64.0), Symbol::times, 16, 1.0 / 64.0);
    const Vector v = x.ensemble(2000, RandomStream(7)).col(1);
    // Var X2_1 = 2 E|X1_1| with X1_1 ~ N(0, 2 sqrt(2/pi))
    const double var = 2.0 * kRootTwoOverPi * std::sqrt(2.0 * kRootTwoOverPi);
    CHECK(ks_one_sample(v, [var](double z) { return normal_cdf(z, var); }).p_value > 0.01);
  }
}

TEST_CASE("dyadic words: estimated Hurst index") {
  const RecursionState base = RecursionState::fbm(2.0, 0.5, TimeGrid::unit(16));
  const RecursionState x1 = recurse_step(base, Symbol::times, 16, 1.0 / 64.0);
  const RecursionState x2 = recurse_step(x1, Symbol::times, 16, 1.0 / 64.0);
  for (const RecursionState* s : {&x1, &x2}) {
    const HurstReport h = estimate_hurst(s->ensemble(1000, RandomStream(8)), s->grid);
    CAPTURE(s->word.str());
    CHECK(std::abs(h.estimate - s->hurst) < 0.05);
  }
}

TEST_CASE("pp conditions") {
  SUBCASE("Brownian motion passes") {
    const RecursionState bm = RecursionState::fbm(2.0, 0.5, TimeGrid::unit(64));
    const PpReport rep = check_pp_conditions(bm, 2000, RandomStream(9));
    CHECK(rep.all_passed());
    CHECK(std::abs(rep.a.value - kRootTwoOverPi) < 0.05);
  }
  SUBCASE("rough fBm keeps a stable supremum") {
    const RecursionState f = RecursionState::fbm(2.0, 0.25, TimeGrid::unit(64));
    CHECK(check_pp_conditions(f, 2000, RandomStream(10)).d.passed);
  }
  SUBCASE("the zero process fails (a)") {
    RecursionState zero = RecursionState::fbm(2.0, 0.5, TimeGrid::unit(8));
    zero.generator = [](RandomStream&) { return Vector::Zero(9).eval(); };
    const PpReport rep = check_pp_conditions(zero, 100, RandomStream(11));
    CHECK_FALSE(rep.a.passed);
    CHECK_FALSE(rep.all_passed());
  }
  CHECK_THROWS_AS(check_pp_conditions(RecursionState::fbm(2.0, 0.5, TimeGrid::unit(8)), 10, RandomStream(12)),
                  ParameterError);
}

TEST_CASE("fractional moments below alpha are stable under doubling") {
  const RecursionState x = recurse_step(RecursionState::fbm(1.5, 0.5, TimeGrid::unit(1)), Symbol::minus, 1, 1.0 / 64.0);
  const Vector v = x.ensemble(8000, RandomStream(13)).col(1).cwiseAbs().cwiseSqrt();
  const auto half = mean_with_stderr(v.head(4000));
  const auto other = mean_with_stderr(v.tail(4000));
  CHECK(std::abs(half.mean - other.mean) <= 3.0 * std::hypot(half.stderr_, other.stderr_));
}
