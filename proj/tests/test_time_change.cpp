#include "rwrt/limits.hpp"
#include "rwrt/time_change.hpp"

#include <doctest.h>

#include <cmath>

using namespace rwrt;

TEST_CASE("hitting times by hand") {
  const RealPath y(1.0, Vector{{0.0, 0.5, 1.5, 0.2}});
  CHECK(*hitting_time(y, 1.0) == doctest::Approx(1.5));
  CHECK(*hitting_time(y, 0.5) == doctest::Approx(1.0));
  CHECK_FALSE(hitting_time(y, 2.0).has_value());
  CHECK_THROWS_AS(hitting_time(y, 0.0), ParameterError);
  CHECK_THROWS_AS(hitting_time(y, -1.0), ParameterError);

  // Y_0 = 0 is implied before the first sampled time
  const Vector times{{1.0, 2.0}};
  const Vector values{{2.0, 3.0}};
  CHECK(*hitting_time(times, values, 1.0) == doctest::Approx(0.5));
  CHECK(*hitting_time(times, values, 2.5) == doctest::Approx(1.5));
  CHECK_FALSE(hitting_time(times, values, 4.0).has_value());
}

TEST_CASE("hitting times increase with the level") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream s(seed);
    const RealPath y = DriverSpec::fbm(0.75).sample(TimeGrid::span(16.0, 2048), s);
    const HittingTimeMap map = HittingTimeMap::build(y, Vector::LinSpaced(10, 0.1, 1.0));
    std::optional<double> prev;
    for (const auto& t : map.taus) {
      if (prev && t) CHECK(*t >= *prev);
      if (!t) break;  // once a level is missed, higher ones are too
      prev = t;
    }
    for (std::size_t i = 1; i < map.taus.size(); ++i) {
      if (!map.taus[i - 1]) CHECK_FALSE(map.taus[i].has_value());
    }
  }
}

TEST_CASE("overshoot is bounded by the one-step oscillation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream s(100 + seed);
    const RealPath y = DriverSpec::brownian().sample(TimeGrid::span(8.0, 512), s);
    const double osc = (y.values.tail(512) - y.values.head(512)).cwiseAbs().maxCoeff();
    const HittingTimeMap map = HittingTimeMap::build(y, Vector{{0.25, 0.5, 1.0}});
    for (Index i = 0; i < map.levels.size(); ++i) {
      if (!map.taus[static_cast<std::size_t>(i)]) continue;
      CHECK(map.overshoot[i] >= 0.0);
      CHECK(map.overshoot[i] <= osc);
    }
  }
}

TEST_CASE("Brownian motion, level 1, horizon 64: fraction never reaching the level") {
  // Reflection gives P(|N(0, 64)| < 1); monitoring on a grid of step dt shifts
  // the effective barrier up by 0.5826 sqrt(dt).
  const Index steps = 4096;
  const double dt = 64.0 / static_cast<double>(steps);
  Vector missed(20000);
  for (Index r = 0; r < missed.size(); ++r) {
    RandomStream s = RandomStream(7).child("r", static_cast<std::uint64_t>(r));
    const RealPath y = DriverSpec::brownian().sample(TimeGrid::span(64.0, steps), s);
    missed[r] = hitting_time(y, 1.0) ? 0.0 : 1.0;
  }
  const double barrier = 1.0 + 0.5826 * std::sqrt(dt);
  const double oracle = 2.0 * normal_cdf(barrier, 64.0) - 1.0;
  const auto e = mean_with_stderr(missed);
  CHECK(std::abs(e.mean - oracle) <= 3.0 * e.stderr_);
  CHECK(e.mean > 0.05);  // nowhere near a 1% drop rate at this horizon
}

TEST_CASE("extract spec validation") {
  ExtractSpec spec;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  spec.levels = Vector{{1.0, 0.5}};
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  spec.levels = Vector{{0.5, 1.0}};
  CHECK_NOTHROW(spec.validate());
  spec.hurst = 1.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
}

TEST_CASE("minus extraction is Brownian motion") {
  ExtractSpec spec;
  spec.levels = Vector{{0.5, 1.0, 2.0}};
  spec.replicates = 3000;
  const ExtractReport rep = extract_bm_minus(spec, RandomStream(8));
  CHECK(rep.mode == "minus");
  CHECK(rep.drop_rate < 0.01);
  CHECK(rep.samples.rows() == rep.replicates - rep.dropped);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      CHECK(rep.target_cov(i, j) == doctest::Approx(2.0 * std::min(spec.levels[i], spec.levels[j])));
      CHECK(std::abs(rep.cov.cov(i, j) - rep.target_cov(i, j)) <= 3.0 * rep.cov.stderr_(i, j));
    }
  }
  const Vector x1 = rep.samples.col(1);
  CHECK(ks_one_sample(x1, [](double z) { return normal_cdf(z, 2.0); }).p_value > 0.01);

  // increments over disjoint level intervals are uncorrelated
  Matrix inc(rep.samples.rows(), 2);
  inc.col(0) = rep.samples.col(0);
  inc.col(1) = rep.samples.col(2) - rep.samples.col(1);
  const CovarianceReport c = cov_matrix(inc);
  CHECK(std::abs(c.cov(0, 1)) <= 3.0 * c.stderr_(0, 1));
  CHECK(rep.median_overshoot >= 0.0);
}

TEST_CASE("times extraction") {
  ExtractSpec spec;
  spec.levels = Vector{{1.0, 2.0}};
  spec.replicates = 600;
  spec.copies = 4;
  const ExtractReport rep = extract_bm_times(spec, RandomStream(9));
  CHECK(rep.mode == "times");
  CHECK(rep.drop_rate < 0.02);
  CHECK(rep.pair_second_moment_target == doctest::Approx(10.0));
  CHECK(std::abs(rep.pair_second_moment - 10.0) <= 3.0 * rep.pair_second_moment_stderr);
  for (Index i = 0; i < 2; ++i) CHECK(std::abs(rep.cov.cov(i, i) - 2.0 * spec.levels[i]) <= 3.0 * rep.cov.stderr_(i, i));
}

TEST_CASE("extraction is reproducible") {
  ExtractSpec spec;
  spec.levels = Vector{{1.0}};
  spec.replicates = 20;
  const ExtractReport a = extract_bm_minus(spec, RandomStream(10));
  const ExtractReport b = extract_bm_minus(spec, RandomStream(10));
  CHECK(a.samples == b.samples);
  CHECK(a.dropped == b.dropped);
}
