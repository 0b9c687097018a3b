#include "rwrt/limits.hpp"
#include "rwrt/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rwrt;

namespace {

RealPath bm_path(std::uint64_t seed, Index steps, double horizon = 1.0) {
  RandomStream s(seed);
  return DriverSpec::brownian().sample(TimeGrid::span(horizon, steps), s);
}

// E exp(-k |Z|) for Z ~ N(0, 1) by the trapezoid rule on [0, 12]
double abs_normal_laplace(double k) {
  const double du = 1e-4;
  double acc = 0.0;
  for (double u = 0.0; u < 12.0; u += du) {
    const auto g = [k](double x) { return std::exp(-0.5 * x * x - k * x); };
    acc += 0.5 * du * (g(u) + g(u + du));
  }
  return 2.0 * acc / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("local time of simple paths") {
  const RealPath up(1.0, Vector{{0.0, 1.0}});
  CHECK(occupation_time(up, 0.0, 0.5) == doctest::Approx(0.5));
  CHECK(occupation_time(up, 0.25, 2.0) == doctest::Approx(0.75));
  CHECK(occupation_time(up, 0.5, 0.0) == doctest::Approx(0.5));
  const LocalTimeProfile lt = local_time(up, 0.25);
  CHECK(lt.mass() == doctest::Approx(1.0));
  CHECK(lt.integral(0.0, 0.5) == doctest::Approx(0.5));

  const RealPath flat(0.5, Vector::Constant(5, 0.3));
  CHECK(occupation_time(flat, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK(local_time(flat).mass() == doctest::Approx(2.0));
}

TEST_CASE("local time conserves mass and matches the occupation time") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RealPath y = bm_path(seed, 4096, 3.0);
    const LocalTimeProfile lt = local_time(y);
    CHECK(std::abs(lt.mass() - 3.0) < 1e-12);
    // bin-aligned intervals carry no end-cell pro-rating error
    const double a = lt.bins.edge(lt.bins.count / 4);
    const double b = lt.bins.edge(3 * lt.bins.count / 4);
    CHECK(std::abs(lt.integral(a, b) - occupation_time(y, a, b)) < 1e-12);
  }
}

TEST_CASE("occupation time against counting grid points") {
  // counting fine-grid nodes inside [a, b] on a refined linear interpolant
  const RealPath y = bm_path(11, 1024);
  const Index refine = 64;
  const double a = -0.2;
  const double b = 0.3;
  double counted = 0.0;
  for (Index s = 0; s < y.steps(); ++s) {
    for (Index j = 0; j < refine; ++j) {
      const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(refine);
      const double v = (1.0 - u) * y.values[s] + u * y.values[s + 1];
      if (v >= a && v <= b) counted += y.dt / static_cast<double>(refine);
    }
  }
  CHECK(std::abs(occupation_time(y, a, b) - counted) < 0.01);
}

TEST_CASE("bins extend to cover the path") {
  const RealPath y = bm_path(12, 256);
  const LocalTimeProfile lt = local_time(y, Bins{0.0, 0.01, 1});
  CHECK(lt.bins.lo <= y.values.minCoeff());
  CHECK(lt.bins.hi() > y.values.maxCoeff());
  CHECK(lt.mass() == doctest::Approx(1.0));
}

TEST_CASE("local-time scaling is exact on a rescaled path") {
  const double c = 3.0;
  for (const double h : {0.5, 0.75}) {
    RandomStream s(13);
    const RealPath y = DriverSpec::fbm(h).sample(TimeGrid::unit(2048), s);
    const RealPath z(c * y.dt, std::pow(c, h) * y.values);
    const double ratio = local_time(z).l2() / local_time(y).l2();
    CHECK(ratio == doctest::Approx(std::pow(c, 2.0 * (1.0 - h) + h)).epsilon(1e-9));
  }
}

TEST_CASE("localtime_scaling_check") {
  RandomStream s(14);
  const ScalingReport one = localtime_scaling_check(DriverSpec::brownian(), 1.0, 500, 1024, s);
  CHECK(one.target == 1.0);
  CHECK(one.passed);
  RandomStream t(15);
  const ScalingReport four = localtime_scaling_check(DriverSpec::brownian(), 4.0, 1000, 2048, t);
  CHECK(four.target == doctest::Approx(8.0));
  CHECK(four.passed);
  CHECK_THROWS_AS(localtime_scaling_check(DriverSpec::brownian(), 0.0, 10, 16, t), ParameterError);
}

TEST_CASE("hurst targets and the mean kernel") {
  CHECK(hurst_target(2.0, 0.5, KernelKind::indicator) == doctest::Approx(0.25));
  CHECK(hurst_target(2.0, 0.5, KernelKind::localtime) == doctest::Approx(0.75));
  CHECK(hurst_target(1.5, 0.75, KernelKind::localtime) == doctest::Approx(0.75));
  CHECK(mean_indicator_kernel(0.0, 1.0, 0.5) == doctest::Approx(0.5));
  CHECK(mean_indicator_kernel(1.0, 1.0, 0.5) == doctest::Approx(0.158655).epsilon(1e-5));
  CHECK(mean_indicator_kernel(2.0, 4.0, 0.5) == doctest::Approx(0.158655).epsilon(1e-5));
  CHECK(mean_indicator_kernel(1.0, 0.0, 0.5) == 0.0);
}

TEST_CASE("limit processes vanish at t = 0") {
  for (const Flavor f : {Flavor::delta, Flavor::gamma, Flavor::lambda}) {
    for (const KernelKind k : {KernelKind::indicator, KernelKind::localtime}) {
      LimitSpec spec;
      spec.flavor = f;
      spec.kernel = k;
      spec.alpha = 1.5;
      spec.copies = 4;
      spec.driver_steps = 256;
      RandomStream s(16);
      const RealPath x = simulate_limit(spec, TimeGrid::unit(8), s);
      CHECK(x.values[0] == 0.0);
      CHECK(x.values.allFinite());
    }
  }
}

TEST_CASE("delta with indicator kernel: ecf against a quadrature oracle") {
  // given Y_1, Delta_1 is SaS with sigma^alpha = |Y_1|
  const Vector theta = theta_grid(0.25, 2.0, 8);
  for (const double alpha : {1.5, 2.0}) {
    LimitSpec spec;
    spec.alpha = alpha;
    Vector x(20000);
    for (Index r = 0; r < x.size(); ++r) {
      RandomStream s = RandomStream(17).child("r", static_cast<std::uint64_t>(r));
      x[r] = simulate_limit(spec, TimeGrid::unit(1), s).values[1];
    }
    const EcfReport e = ecf(x, theta);
    for (Index k = 0; k < theta.size(); ++k) {
      CAPTURE(alpha);
      CAPTURE(theta[k]);
      CHECK(std::abs(e.value[k] - abs_normal_laplace(std::pow(theta[k], alpha))) <= 3.5 * e.stderr_[k] + 2e-3);
    }
  }
}

TEST_CASE("gamma with indicator kernel: variance 2 E|Y_1|") {
  LimitSpec spec;
  spec.flavor = Flavor::gamma;
  spec.copies = 64;
  Vector sq(2000);
  for (Index r = 0; r < sq.size(); ++r) {
    RandomStream s = RandomStream(18).child("r", static_cast<std::uint64_t>(r));
    sq[r] = std::pow(simulate_limit(spec, TimeGrid::unit(1), s).values[1], 2);
  }
  const auto e = mean_with_stderr(sq);
  CHECK(std::abs(e.mean - 2.0 * std::sqrt(2.0 / std::numbers::pi)) <= 3.0 * e.stderr_);
}

TEST_CASE("equal driver paths give equal limits") {
  const RealPath y = bm_path(19, 512);
  for (const KernelKind k : {KernelKind::indicator, KernelKind::localtime}) {
    RandomStream a(20);
    RandomStream b(20);
    const Vector d = integrate_kernels({y}, Flavor::delta, k, 1.5, 1.0 / 64.0, 8, a);
    const Vector l = integrate_kernels({y, y, y}, Flavor::lambda, k, 1.5, 1.0 / 64.0, 8, b);
    CHECK((d - l).cwiseAbs().maxCoeff() < 1e-12);
  }
  RandomStream c(21);
  CHECK_THROWS_AS(integrate_kernels({y, y}, Flavor::delta, KernelKind::indicator, 1.5, 0.1, 8, c), ParameterError);
  CHECK_THROWS_AS(integrate_kernels({y}, Flavor::delta, KernelKind::indicator, 1.5, 0.1, 7, c), ParameterError);
}

TEST_CASE("delta has stationary increments") {
  LimitSpec spec;
  spec.alpha = 1.5;
  spec.kernel = KernelKind::localtime;
  spec.driver_steps = 512;
  spec.cell_width = 1.0 / 64.0;
  Vector early(2000);
  Vector late(2000);
  for (Index r = 0; r < early.size(); ++r) {
    RandomStream s = RandomStream(22).child("r", static_cast<std::uint64_t>(r));
    const RealPath x = simulate_limit(spec, TimeGrid::unit(2), s);
    early[r] = x.values[1];
    late[r] = x.values[2] - x.values[1];
  }
  CHECK(ks_two_sample(early, late).p_value > 0.01);
}

TEST_CASE("Levy driver has exact stable marginals") {
  const DriverSpec levy = DriverSpec::levy(1.5);
  CHECK(levy.hurst_prime() == doctest::Approx(1.0 / 1.5));
  Vector y(5000);
  for (Index r = 0; r < y.size(); ++r) {
    RandomStream s = RandomStream(23).child("r", static_cast<std::uint64_t>(r));
    y[r] = levy.sample(TimeGrid::span(2.0, 8), s).values[8];
  }
  RandomStream t(24);
  const Vector ref = sample_sas({1.5, std::pow(2.0, 1.0 / 1.5)}, 5000, t);
  CHECK(ks_two_sample(y, ref).p_value > 0.01);
}

TEST_CASE("limit spec validation") {
  LimitSpec spec;
  spec.flavor = Flavor::lambda;
  spec.alpha = 1.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  spec.alpha = 1.5;
  CHECK_NOTHROW(spec.validate());
  spec.exact_mean_kernel = true;
  CHECK_NOTHROW(spec.validate());
  spec.flavor = Flavor::delta;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  CHECK_THROWS_AS(DriverSpec::fbm(1.0).validate(), ParameterError);
  CHECK_THROWS_AS(DriverSpec::levy(2.5).validate(), ParameterError);
  CHECK(flavor_from_string(to_string(Flavor::gamma)) == Flavor::gamma);
  CHECK(kernel_from_string(to_string(KernelKind::localtime)) == KernelKind::localtime);
  CHECK_THROWS_AS(flavor_from_string("omega"), ParameterError);
}
