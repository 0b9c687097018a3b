#include "rwrt/stats.hpp"
#include "rwrt/walks.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace rwrt;

TEST_CASE("simple walk steps are +-1") {
  RandomStream s(1);
  const LatticePath p = gen_walk(CollectingSpec::simple(), 3, s);
  REQUIRE(p.positions.size() == 4);
  CHECK(p.positions[0] == 0);
  for (Index k = 1; k <= 3; ++k) CHECK(std::abs(p.positions[k] - p.positions[k - 1]) == 1);
}

TEST_CASE("walk_positions_at matches gen_walk") {
  for (const CollectingSpec spec :
       {CollectingSpec::simple(), CollectingSpec::beta_stable(1.5), CollectingSpec::gaussian_dependent(0.7)}) {
    RandomStream a(2);
    RandomStream b(2);
    const LatticePath p = gen_walk(spec, 1000, a);
    const std::array<Index, 5> idx{0, 1, 63, 64, 1000};
    const LatticeVector at = walk_positions_at(spec, 1000, idx, b);
    for (std::size_t i = 0; i < idx.size(); ++i) CHECK(at[static_cast<Index>(i)] == p.positions[idx[i]]);
  }
}

TEST_CASE("beta-stable walk with beta = 2: CLT scale") {
  // step variance of round(N(0, 2)) by direct summation over the lattice
  double step_var = 0.0;
  for (int k = 1; k < 40; ++k) {
    const double pk = normal_cdf(k + 0.5, 2.0) - normal_cdf(k - 0.5, 2.0);
    step_var += 2.0 * k * k * pk;
  }
  const Index n = 100000;
  Vector end(2000);
  for (Index r = 0; r < end.size(); ++r) {
    RandomStream s = RandomStream(3).child("w", static_cast<std::uint64_t>(r));
    end[r] = static_cast<double>(gen_walk(CollectingSpec::beta_stable(2.0), n, s).positions[n]) / std::sqrt(double(n));
  }
  const double var = end.squaredNorm() / static_cast<double>(end.size());
  CHECK(std::abs(var / step_var - 1.0) < 0.1);
}

TEST_CASE("gaussian-dependent walk: ceiling consistency and Hurst index") {
  RandomStream s(4);
  const LatticePath p = gen_walk(CollectingSpec::gaussian_dependent(0.75), 4096, s);
  REQUIRE(p.underlying.size() == p.positions.size());
  for (Index k = 0; k < p.positions.size(); ++k) {
    const double gap = static_cast<double>(p.positions[k]) - p.underlying[k];
    CHECK(gap >= 0.0);
    CHECK(gap < 1.0);
  }

  const Index n = 1 << 14;
  const Index grid_steps = 256;
  Matrix ens(300, grid_steps + 1);
  for (Index r = 0; r < ens.rows(); ++r) {
    RandomStream t = RandomStream(5).child("w", static_cast<std::uint64_t>(r));
    ens.row(r) = rescale(gen_walk(CollectingSpec::gaussian_dependent(0.75), n, t), n, 0.75, grid_steps).values.transpose();
  }
  const HurstReport h = estimate_hurst(ens, TimeGrid::unit(grid_steps), 8);
  CHECK(std::abs(h.estimate - 0.75) < 0.05);
}

TEST_CASE("interpolate") {
  const Vector two{{0.0, 2.0}};
  CHECK(interpolate(two, 0.5) == 1.0);
  const Vector three{{0.0, 1.0, 3.0}};
  CHECK(interpolate(three, 1.25) == 1.5);
  CHECK(interpolate(three, 2.0) == 3.0);
  const LatticeVector lat{{0, -1, -2, -1}};
  for (Index k = 0; k < lat.size(); ++k) CHECK(interpolate(lat, static_cast<double>(k)) == lat[k]);
  CHECK_THROWS_AS(interpolate(three, 2.5), RangeError);
  CHECK_THROWS_AS(interpolate(three, -0.1), RangeError);
}

TEST_CASE("rescale") {
  RandomStream s(6);
  const Index n = 400;
  const LatticePath p = gen_walk(CollectingSpec::simple(), n, s);
  const RealPath x = rescale(p, n, 0.5);
  CHECK(x.values[0] == 0.0);
  CHECK(x.values[n] == doctest::Approx(static_cast<double>(p.positions[n]) / 20.0));
  CHECK(x.horizon() == doctest::Approx(1.0));
}

TEST_CASE("simple walk: Donsker scale and bounded first moment") {
  const std::array<int, 4> logs{8, 10, 12, 14};
  std::vector<MeanEstimate> abs_means;
  for (const int lg : logs) {
    const Index n = Index{1} << lg;
    Vector x(1000);
    for (Index r = 0; r < x.size(); ++r) {
      RandomStream s = RandomStream(7).child("n", static_cast<std::uint64_t>(lg)).child("w", static_cast<std::uint64_t>(r));
      const std::array<Index, 1> idx{n};
      x[r] = static_cast<double>(walk_positions_at(CollectingSpec::simple(), n, idx, s)[0]) / std::sqrt(double(n));
    }
    if (lg == 14) CHECK(std::abs(x.squaredNorm() / 1000.0 - 1.0) < 0.1);
    abs_means.push_back(mean_with_stderr(x.cwiseAbs()));
  }
  for (std::size_t i = 1; i < abs_means.size(); ++i) {
    CHECK(abs_means[i].mean - abs_means[0].mean <= 3.0 * std::hypot(abs_means[i].stderr_, abs_means[0].stderr_));
  }
}

TEST_CASE("stationary increments") {
  for (const CollectingSpec spec : {CollectingSpec::simple(), CollectingSpec::beta_stable(1.5)}) {
    Vector early(3000);
    Vector late(3000);
    for (Index r = 0; r < early.size(); ++r) {
      RandomStream s = RandomStream(8).child("w", static_cast<std::uint64_t>(r));
      const LatticePath p = gen_walk(spec, 600, s);
      early[r] = static_cast<double>(p.positions[100] - p.positions[0]);
      late[r] = static_cast<double>(p.positions[600] - p.positions[500]);
    }
    CHECK(ks_two_sample(early, late).p_value > 0.01);
  }
}

TEST_CASE("collecting spec validation") {
  CHECK_THROWS_AS(CollectingSpec::beta_stable(1.0).validate(), ParameterError);
  CHECK_THROWS_AS(CollectingSpec::beta_stable(2.5).validate(), ParameterError);
  CHECK_THROWS_AS(CollectingSpec::gaussian_dependent(1.0).validate(), ParameterError);
  CHECK(CollectingSpec::beta_stable(1.25).hurst_prime() == doctest::Approx(0.8));
  CHECK(walk_kind_from_string("gaussian-dependent") == WalkKind::gaussian_dependent);
  CHECK_THROWS_AS(walk_kind_from_string("lazy"), ParameterError);
}
