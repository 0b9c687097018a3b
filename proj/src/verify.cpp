#include "rwrt/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

namespace rwrt {

void VerifyConfig::validate() const {
  if (replicates && *replicates < 100) throw ParameterError("cli", "replicates override must be at least 100");
  if (criteria.empty()) throw ParameterError("cli", "no criteria selected");
  for (const int id : criteria) {
    if (id < 1 || id > 11) throw ParameterError("cli", "unknown criterion " + std::to_string(id));
  }
}

Json to_json(const VerifyConfig& c) {
  Json j{{"seed", c.seed}, {"criteria", c.criteria}};
  j["replicates"] = c.replicates ? Json(*c.replicates) : Json(nullptr);
  return j;
}

const std::vector<CriterionInfo>& criterion_table() {
  static const std::vector<CriterionInfo> table{
      {1, "dual-definition equivalence", 30},
      {2, "power variations are reward processes", 30},
      {3, "stable integral law", 60},
      {4, "occupation formula", 60},
      {5, "f.d.d. convergence of RWRT", 300},
      {6, "Hurst exponents", 300},
      {7, "recursion", 300},
      {8, "schema limits", 300},
      {9, "time change", 300},
      {10, "local-time scaling", 120},
      {11, "determinism", 1200},
  };
  return table;
}

namespace {

const CriterionInfo& info(int id) {
  for (const auto& c : criterion_table())
    if (c.id == id) return c;
  throw ParameterError("cli", "unknown criterion " + std::to_string(id));
}

Index count(const VerifyConfig& c, Index fallback) { return c.replicates.value_or(fallback); }

struct Verdict {
  bool passed;
  Json metrics;
};

bool within(double value, double target, double stderr_, double k = 3.0) {
  return std::abs(value - target) <= k * stderr_;
}

// --- 1 --------------------------------------------------------------------

Verdict dual_definition(const VerifyConfig& cfg, const RandomStream& root) {
  const Index pairs = count(cfg, 1000);
  constexpr Index n = 10000;
  double worst = 0.0;
  for (Index r = 0; r < pairs; ++r) {
    RandomStream ws = root.child("walk", static_cast<std::uint64_t>(r));
    const LatticePath walk = gen_walk(CollectingSpec::simple(), n, ws);
    const SceneryField eta(SceneryKind::gaussian, 2.0, Site::edge, root.child("scenery", static_cast<std::uint64_t>(r)));
    worst = std::max(worst, max_relative_deviation(rwrt_signed(eta, walk), rwrt_indicator(eta, walk)));
  }
  return {worst < 1e-9, Json{{"pairs", pairs}, {"n", n}, {"max_relative_deviation", worst}, {"tolerance", 1e-9}}};
}

// --- 2 --------------------------------------------------------------------

Verdict rant(const VerifyConfig& cfg, const RandomStream& root) {
  const Index paths = count(cfg, 100);
  constexpr Index n = 10000;
  Json per_p = Json::array();
  bool ok = true;
  for (int p = 1; p <= 4; ++p) {
    double worst = 0.0;
    bool all = true;
    double moment = 0.0;
    for (Index r = 0; r < paths; ++r) {
      RandomStream ws = root.child("walk", static_cast<std::uint64_t>(r));
      const LatticePath walk = gen_walk(CollectingSpec::simple(), n, ws);
      const SceneryField eta(SceneryKind::gaussian, 2.0, Site::edge, root.child("scenery", static_cast<std::uint64_t>(r)));
      const RantReport rep = rant_check(eta, walk, p);
      worst = std::max(worst, rep.max_deviation);
      all = all && rep.passed;
      moment = rep.moment;
    }
    ok = ok && all;
    per_p.push_back({{"p", p}, {"moment", moment}, {"max_deviation", worst}, {"passed", all}});
  }
  return {ok, Json{{"paths", paths}, {"n", n}, {"tolerance", 1e-9}, {"orders", per_p}}};
}

// --- 3 --------------------------------------------------------------------

Verdict stable_law(const VerifyConfig& cfg, const RandomStream& root) {
  const Index samples = count(cfg, 10000);
  const Integrand f = Integrand::indicator(0.0, 1.0) + Integrand::indicator(1.0, 3.0, 0.5);
  constexpr double h = 1.0 / 64.0;
  constexpr double half_width = 4.0;
  Json per_alpha = Json::array();
  bool ok = true;
  for (const double alpha : {1.2, 1.7, 2.0}) {
    const RandomStream s = root.child("alpha", static_cast<std::uint64_t>(std::lround(alpha * 10)));
    Vector grid_samples(samples);
    for (Index r = 0; r < samples; ++r) {
      const MeasureGrid1D m(alpha, h, half_width, s.child("grid", static_cast<std::uint64_t>(r)));
      grid_samples[r] = stable_integral(f, m);
    }
    const double norm = std::pow(1.0 + 2.0 * std::pow(0.5, alpha), 1.0 / alpha);
    RandomStream direct = s.child("direct");
    const Vector direct_samples = sample_sas({alpha, norm}, samples, direct);
    const KsResult ks = ks_two_sample(grid_samples, direct_samples);
    const bool pass = ks.p_value > 0.01;
    ok = ok && pass;
    per_alpha.push_back({{"alpha", alpha}, {"norm", norm}, {"ks", to_json(ks)}, {"passed", pass}});
  }
  return {ok, Json{{"samples", samples}, {"cell_width", h}, {"half_width", half_width}, {"alphas", per_alpha}}};
}

// --- 4 --------------------------------------------------------------------

Verdict occupation(const VerifyConfig& cfg, const RandomStream& root) {
  const Index paths = cfg.replicates ? std::max<Index>(1, *cfg.replicates / 20) : 5;
  constexpr Index intervals = 20;
  constexpr Index steps = 1 << 14;
  Json per_h = Json::array();
  bool ok = true;
  for (const double hurst : {0.5, 0.75}) {
    const RandomStream s = root.child("hurst", static_cast<std::uint64_t>(std::lround(hurst * 100)));
    double worst = 0.0;
    double worst_grid = 0.0;
    for (Index p = 0; p < paths; ++p) {
      RandomStream ps = s.child("path", static_cast<std::uint64_t>(p));
      const RealPath y = gen_fbm_path(hurst, TimeGrid::unit(steps), ps);
      const double lo = y.values.minCoeff();
      const double range = y.values.maxCoeff() - lo;
      const LocalTimeProfile lt = local_time(y, range / 256.0);
      RandomStream is = s.child("intervals", static_cast<std::uint64_t>(p));
      for (Index i = 0; i < intervals; ++i) {
        const double len = (0.2 + 0.4 * is.uniform()) * range;
        const double a = lo + is.uniform() * (range - len);
        const double b = a + len;
        const double occ = occupation_time(y, a, b);
        const double est = lt.integral(a, b);
        // Riemann count over grid nodes: independent of the interpolation.
        const double grid_occ =
            y.dt * static_cast<double>((y.values.head(steps).array() >= a && y.values.head(steps).array() <= b).count());
        worst = std::max(worst, std::abs(est - occ) / occ);
        worst_grid = std::max(worst_grid, std::abs(est - grid_occ) / grid_occ);
      }
    }
    const bool pass = worst < 0.02;
    ok = ok && pass;
    per_h.push_back({{"hurst", hurst},
                     {"max_relative_error", worst},
                     {"max_relative_error_vs_grid_count", worst_grid},
                     {"passed", pass}});
  }
  return {ok, Json{{"paths", paths}, {"intervals_per_path", intervals}, {"steps", steps}, {"tolerance", 0.02},
                   {"drivers", per_h}}};
}

// --- 5 --------------------------------------------------------------------

// Law of the limit at t: M0(1_[0, Y_t]) given Y_t ~ N(0, t) has cf
// E exp(-theta^2 |Y_t|) = exp(theta^4 t / 2) erfc(theta^2 sqrt(t / 2)).
double limit_cf(double theta, double t) {
  const double q = theta * theta;
  return std::exp(q * q * t / 2.0) * std::erfc(q * std::sqrt(t / 2.0));
}

Verdict fdd_convergence(const VerifyConfig& cfg, const RandomStream& root) {
  const Index reps = count(cfg, 10000);
  const Index cond_reps = cfg.replicates ? 100 * *cfg.replicates : 1000000;
  const Vector theta = theta_grid(-3.0, 3.0, 61);
  const std::array<double, 2> times{0.5, 1.0};
  const CollectingSpec simple = CollectingSpec::simple();

  // Plain ecfs: discrete at n = 2^14 against the simulated limit.
  constexpr Index n = 1 << 14;
  const std::array<Index, 2> idx{n / 2, n};
  const double scale = std::pow(static_cast<double>(n), -0.25);
  Matrix discrete(reps, 2);
  Matrix limit(reps, 2);
  LimitSpec spec;
  spec.flavor = Flavor::delta;
  spec.kernel = KernelKind::indicator;
  spec.driver = DriverSpec::brownian();
  spec.cell_width = 1.0 / 256.0;
  for (Index r = 0; r < reps; ++r) {
    const auto ur = static_cast<std::uint64_t>(r);
    RandomStream ws = root.child("walk", ur);
    const LatticeVector pos = walk_positions_at(simple, n, idx, ws);
    const SceneryField eta(SceneryKind::rademacher, 2.0, Site::edge, root.child("scenery", ur));
    const EdgePrefix s(eta, pos.minCoeff(), pos.maxCoeff());
    discrete(r, 0) = scale * s(pos[0]);
    discrete(r, 1) = scale * s(pos[1]);
    RandomStream ls = root.child("limit", ur);
    const RealPath x = simulate_limit(spec, TimeGrid::unit(2), ls);
    limit(r, 0) = x.values[1];
    limit(r, 1) = x.values[2];
  }
  double plain = 0.0;
  double limit_vs_closed_form = 0.0;
  for (Index j = 0; j < 2; ++j) {
    const EcfReport d = ecf(discrete.col(j), theta);
    const EcfReport l = ecf(limit.col(j), theta);
    plain = std::max(plain, ecf_distance(d, l));
    for (Index k = 0; k < theta.size(); ++k)
      limit_vs_closed_form = std::max(limit_vs_closed_form, std::abs(l.value[k] - limit_cf(theta[k], times[j])));
  }

  // Conditional ecfs: given the walk, n^{-1/4} S(W(nt)) is a sum of |W(nt)|
  // independent +-sqrt(2) n^{-1/4}, so E[cos | W] = cos(theta sqrt(2) n^{-1/4})^|W|.
  Json per_n = Json::array();
  std::vector<double> dist;
  for (const int log2n : {8, 11, 14}) {
    const Index m = Index{1} << log2n;
    const std::array<Index, 2> at{m / 2, m};
    std::array<std::vector<double>, 2> hist{std::vector<double>(static_cast<std::size_t>(m + 1), 0.0),
                                            std::vector<double>(static_cast<std::size_t>(m + 1), 0.0)};
    const RandomStream s = root.child("conditional", static_cast<std::uint64_t>(log2n));
    for (Index r = 0; r < cond_reps; ++r) {
      RandomStream ws = s.child("walk", static_cast<std::uint64_t>(r));
      const LatticeVector pos = walk_positions_at(simple, m, at, ws);
      hist[0][static_cast<std::size_t>(std::abs(pos[0]))] += 1.0;
      hist[1][static_cast<std::size_t>(std::abs(pos[1]))] += 1.0;
    }
    const double step = std::sqrt(2.0) * std::pow(static_cast<double>(m), -0.25);
    double d = 0.0;
    for (Index j = 0; j < 2; ++j) {
      for (Index k = 0; k < theta.size(); ++k) {
        const double c = std::cos(theta[k] * step);
        double acc = 0.0;
        double pw = 1.0;
        for (const double h : hist[static_cast<std::size_t>(j)]) {
          acc += h * pw;
          pw *= c;
        }
        d = std::max(d, std::abs(acc / static_cast<double>(cond_reps) - limit_cf(theta[k], times[j])));
      }
    }
    dist.push_back(d);
    per_n.push_back({{"n", m}, {"distance", d}});
  }
  const bool monotone = dist[0] > dist[1] && dist[1] > dist[2];
  return {plain < 0.05 && monotone,
          Json{{"replicates", reps},
               {"n", n},
               {"plain_distance", plain},
               {"plain_tolerance", 0.05},
               {"simulated_limit_vs_closed_form", limit_vs_closed_form},
               {"conditional_replicates", cond_reps},
               {"conditional", per_n},
               {"monotone", monotone}}};
}

// --- 6 --------------------------------------------------------------------

Verdict hurst_exponents(const VerifyConfig& cfg, const RandomStream& root) {
  const Index paths = count(cfg, 1000);

  LimitSpec spec;
  spec.flavor = Flavor::delta;
  spec.kernel = KernelKind::indicator;
  spec.driver = DriverSpec::brownian();
  spec.cell_width = 1.0 / 1024.0;
  const TimeGrid grid = TimeGrid::unit(1 << 12);
  Matrix delta(paths, grid.points());
  for (Index r = 0; r < paths; ++r) {
    RandomStream s = root.child("delta", static_cast<std::uint64_t>(r));
    delta.row(r) = simulate_limit(spec, grid, s).values.transpose();
  }
  const HurstReport hd = estimate_hurst(delta, grid, 16);
  const double td = hurst_target(2.0, 0.5, KernelKind::indicator);

  constexpr Index n = 1 << 14;
  std::vector<Index> cols;
  Vector times(9);
  for (Index j = 0; j < 9; ++j) {
    cols.push_back(j);
    times[j] = static_cast<double>(Index{64} << j) / static_cast<double>(n);
  }
  Matrix z(paths, 9);
  for (Index r = 0; r < paths; ++r) {
    const auto ur = static_cast<std::uint64_t>(r);
    RandomStream ws = root.child("walk", ur);
    const LatticePath walk = gen_walk(CollectingSpec::simple(), n, ws);
    const SceneryField eta(SceneryKind::rademacher, 2.0, Site::vertex, root.child("scenery", ur));
    const Vector zn = rwrs(eta, walk);
    for (Index j = 0; j < 9; ++j) z(r, j) = zn[Index{64} << j];
  }
  const HurstReport hz = estimate_hurst(z, times, cols);
  constexpr double tz = 0.75;

  const bool pd = std::abs(hd.estimate - td) <= 0.05;
  const bool pz = std::abs(hz.estimate - tz) <= 0.05;
  return {pd && pz, Json{{"paths", paths},
                         {"tolerance", 0.05},
                         {"delta", {{"target", td}, {"hurst", to_json(hd)}, {"passed", pd}}},
                         {"rwrs", {{"n", n}, {"target", tz}, {"hurst", to_json(hz)}, {"passed", pz}}}}};
}

// --- 7 --------------------------------------------------------------------

double times_cov_target(double s, double t) {
  return std::sqrt(2.0 / std::numbers::pi) * (std::sqrt(s) + std::sqrt(t) - std::sqrt(std::abs(t - s)));
}

Verdict recursion(const VerifyConfig& cfg, const RandomStream& root) {
  const Index reps = count(cfg, 4000);
  constexpr Index copies = 512;
  const TimeGrid grid{0.2, 5};
  const RecursionState level0 = RecursionState::fbm(2.0, 0.5, grid);
  const RecursionState level1 = recurse_step(level0, Symbol::times, copies, 1.0 / 64.0);
  const Matrix ens = level1.ensemble(reps, root.child("ensemble"));
  const std::array<Index, 5> cols{1, 2, 3, 4, 5};
  const CovarianceReport cov = cov_matrix(ens, cols);
  Matrix target(5, 5);
  Matrix z(5, 5);
  double worst = 0.0;
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      target(i, j) = times_cov_target(grid.at(i + 1), grid.at(j + 1));
      z(i, j) = (cov.cov(i, j) - target(i, j)) / cov.stderr_(i, j);
      worst = std::max(worst, std::abs(z(i, j)));
    }
  }
  const bool cov_ok = worst <= 3.0;

  // Hurst bookkeeping against exact dyadic arithmetic: with alpha = 2 every
  // level is p / 2^k, phi_+ : p/2^k -> (2^{k+1} - p)/2^{k+1}, phi_- : p/2^{k+1}.
  const Index words = cfg.replicates ? std::max<Index>(*cfg.replicates, 100) : 10000;
  RandomStream ws = root.child("words");
  double dev = 0.0;
  for (Index w = 0; w < words; ++w) {
    RecursionWord word;
    const auto len = 1 + static_cast<int>(ws.uniform() * 12.0);
    std::uint64_t p = 1;
    int k = 1;
    for (int i = 0; i < len; ++i) {
      const auto s = static_cast<Symbol>(std::min(3, static_cast<int>(ws.uniform() * 4.0)));
      word.symbols.push_back(s);
      p = uses_local_time(s) ? (std::uint64_t{1} << (k + 1)) - p : p;
      ++k;
    }
    dev = std::max(dev, std::abs(compose_hurst(word, 0.5, 2.0) - std::ldexp(static_cast<double>(p), -k)));
  }
  const bool words_ok = dev == 0.0;
  return {cov_ok && words_ok,
          Json{{"replicates", reps},
               {"copies", copies},
               {"times", to_json(Vector(grid.times().tail(5)))},
               {"covariance", to_json(cov)},
               {"target", to_json(target)},
               {"max_abs_z", worst},
               {"covariance_passed", cov_ok},
               {"words", words},
               {"compose_max_deviation", dev},
               {"compose_passed", words_ok}}};
}

// --- 8 --------------------------------------------------------------------

// 2 int_0^inf P(N(0,1) >= u)^2 du by composite Simpson on [0, 12].
double single_scenery_norm() {
  constexpr int m = 4800;
  constexpr double hi = 12.0;
  const auto q2 = [](double u) {
    const double q = 0.5 * std::erfc(u / std::numbers::sqrt2);
    return q * q;
  };
  double acc = q2(0.0) + q2(hi);
  for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * q2(hi * i / m);
  return 2.0 * acc * hi / (3.0 * m);
}

Verdict schema_limits(const VerifyConfig& cfg, const RandomStream& root) {
  const Index reps = count(cfg, 10000);
  SchemaSpec ind;
  ind.mode = SchemaMode::independent;
  ind.scenery = SceneryKind::gaussian;
  ind.n = 1 << 12;
  ind.copies = 64;
  Vector x(reps);
  for (Index r = 0; r < reps; ++r) {
    RandomStream s = root.child("independent", static_cast<std::uint64_t>(r));
    x[r] = schema(ind, TimeGrid::unit(1), s).values[1];
  }
  const double var = (x.array() - x.mean()).square().sum() / static_cast<double>(reps - 1);
  const double var_target = 2.0 * std::sqrt(2.0 / std::numbers::pi);
  const bool ind_ok = std::abs(var / var_target - 1.0) < 0.05;

  const Index sreps = cfg.replicates ? *cfg.replicates : 4000;
  SchemaSpec single = ind;
  single.mode = SchemaMode::single_scenery;
  single.n = 1 << 10;
  single.copies = 1 << 10;
  Vector cosines(sreps);
  for (Index r = 0; r < sreps; ++r) {
    RandomStream s = root.child("single", static_cast<std::uint64_t>(r));
    cosines[r] = std::cos(schema(single, TimeGrid::unit(1), s).values[1]);
  }
  const MeanEstimate cf = mean_with_stderr(cosines);
  const double norm = single_scenery_norm();
  const double cf_target = std::exp(-norm);
  const bool single_ok = within(cf.mean, cf_target, cf.stderr_);
  return {ind_ok && single_ok,
          Json{{"independent",
                {{"replicates", reps},
                 {"n", ind.n},
                 {"copies", ind.copies},
                 {"variance", var},
                 {"target", var_target},
                 {"relative_tolerance", 0.05},
                 {"passed", ind_ok}}},
               {"single_scenery",
                {{"replicates", sreps},
                 {"n", single.n},
                 {"copies", single.copies},
                 {"theta", 1.0},
                 {"ecf", cf.mean},
                 {"stderr", cf.stderr_},
                 {"kernel_norm_squared", norm},
                 {"target", cf_target},
                 {"passed", single_ok}}}}};
}

// --- 9 --------------------------------------------------------------------

Verdict time_change(const VerifyConfig& cfg, const RandomStream& root) {
  ExtractSpec minus;
  minus.hurst = 0.75;
  minus.levels = Vector{{0.5, 1.0, 1.5, 2.0}};
  minus.replicates = count(cfg, 10000);
  const ExtractReport rm = extract_bm_minus(minus, root.child("minus"));
  double worst = 0.0;
  for (Index i = 0; i < rm.cov.cov.rows(); ++i)
    for (Index j = 0; j < rm.cov.cov.cols(); ++j)
      worst = std::max(worst, std::abs(rm.cov.cov(i, j) - rm.target_cov(i, j)) / rm.cov.stderr_(i, j));
  const KsResult ks = ks_one_sample(rm.samples.col(1), [](double v) { return normal_cdf(v, 2.0); });
  const bool minus_ok = worst <= 3.0 && ks.p_value > 0.01 && rm.drop_rate < 0.01;

  ExtractSpec times = minus;
  times.levels = Vector{{1.0, 2.0}};
  times.copies = 16;
  const ExtractReport rt = extract_bm_times(times, root.child("times"));
  const bool times_ok = within(rt.pair_second_moment, rt.pair_second_moment_target, rt.pair_second_moment_stderr) &&
                        rt.drop_rate < 0.01;
  return {minus_ok && times_ok,
          Json{{"minus", {{"report", to_json(rm)}, {"max_abs_z", worst}, {"ks_level_1", to_json(ks)}, {"passed", minus_ok}}},
               {"times", {{"report", to_json(rt)}, {"passed", times_ok}}}}};
}

// --- 10 -------------------------------------------------------------------

Verdict localtime_scaling(const VerifyConfig& cfg, const RandomStream& root) {
  const Index reps = count(cfg, 2000);
  constexpr Index steps = 1 << 12;
  RandomStream sb = root.child("brownian");
  RandomStream sf = root.child("fbm");
  const ScalingReport b = localtime_scaling_check(DriverSpec::brownian(), 4.0, reps, steps, sb);
  const ScalingReport f = localtime_scaling_check(DriverSpec::fbm(0.75), 2.0, reps, steps, sf);
  return {b.passed && f.passed, Json{{"replicates", reps},
                                     {"steps", steps},
                                     {"brownian", to_json(b)},
                                     {"fbm_0.75", to_json(f)}}};
}

Verdict dispatch(int id, const VerifyConfig& cfg, const RandomStream& root) {
  switch (id) {
    case 1: return dual_definition(cfg, root);
    case 2: return rant(cfg, root);
    case 3: return stable_law(cfg, root);
    case 4: return occupation(cfg, root);
    case 5: return fdd_convergence(cfg, root);
    case 6: return hurst_exponents(cfg, root);
    case 7: return recursion(cfg, root);
    case 8: return schema_limits(cfg, root);
    case 9: return time_change(cfg, root);
    case 10: return localtime_scaling(cfg, root);
    default: throw ParameterError("cli", "criterion " + std::to_string(id) + " is not a standalone check");
  }
}

template <typename F>
CriterionResult timed(int id, F&& body) {
  CriterionResult res;
  res.id = id;
  res.name = info(id).name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Verdict v = body();
    res.outcome = v.passed ? Outcome::pass : Outcome::fail;
    res.metrics = std::move(v.metrics);
  } catch (const ParameterError& e) {
    res.outcome = Outcome::parameter_error;
    res.error = e.what();
  } catch (const Error& e) {
    res.outcome = Outcome::numeric_error;
    res.error = e.what();
  } catch (const std::bad_alloc&) {
    res.outcome = Outcome::numeric_error;
    res.error = "[cli] out of memory";
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string outcome_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::parameter_error: return "parameter-error";
    case Outcome::numeric_error: return "numeric-error";
  }
  return "?";
}

}  // namespace

Json to_json(const CriterionResult& r) {
  Json j{{"id", r.id}, {"name", r.name}, {"outcome", outcome_string(r.outcome)}, {"passed", r.passed()}};
  if (!r.error.empty()) j["error"] = r.error;
  j["metrics"] = r.metrics.is_null() ? Json::object() : r.metrics;
  return j;
}

CriterionResult run_criterion(int id, const VerifyConfig& config) {
  config.validate();
  const RandomStream root = RandomStream(config.seed).child("criterion", static_cast<std::uint64_t>(id));
  return timed(id, [&] { return dispatch(id, config, root); });
}

std::vector<CriterionResult> run_suite(const VerifyConfig& config,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  config.validate();
  std::vector<int> ids = config.criteria;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<CriterionResult> out;
  std::map<int, std::string> first_dump;
  for (const int id : ids) {
    if (id == 11) continue;
    out.push_back(run_criterion(id, config));
    first_dump[id] = to_json(out.back()).dump();
    if (on_result) on_result(out.back());
  }
  if (ids.back() != 11) return out;

  // Determinism: rerun the standalone criteria and compare their JSON bytes.
  out.push_back(timed(11, [&] {
    if (first_dump.empty()) {
      for (int id = 1; id <= 10; ++id) first_dump[id] = to_json(run_criterion(id, config)).dump();
    }
    std::vector<int> mismatched;
    std::size_t bytes = 0;
    for (const auto& [id, dump] : first_dump) {
      const std::string again = to_json(run_criterion(id, config)).dump();
      bytes += again.size();
      if (again != dump) mismatched.push_back(id);
    }
    std::vector<int> compared;
    for (const auto& kv : first_dump) compared.push_back(kv.first);
    return Verdict{mismatched.empty(),
                   Json{{"compared", compared}, {"bytes", bytes}, {"mismatched", mismatched}}};
  }));
  if (on_result) on_result(out.back());
  return out;
}

Json suite_json(const VerifyConfig& config, const std::vector<CriterionResult>& results) {
  const Json cfg = to_json(config);
  Json j{{"schema_version", 1},
         {"command", "verify"},
         {"seed", config.seed},
         {"config_hash", hex64(content_hash(cfg))},
         {"config", cfg}};
  Json list = Json::array();
  for (const auto& r : results) list.push_back(to_json(r));
  j["criteria"] = list;
  j["passed"] = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
  return j;
}

int exit_code(const std::vector<CriterionResult>& results) {
  int code = 0;
  for (const auto& r : results) {
    if (r.outcome == Outcome::numeric_error) code = std::max(code, 3);
    if (r.outcome == Outcome::parameter_error) code = std::max(code, 2);
    if (r.outcome == Outcome::fail) code = std::max(code, 1);
  }
  return code;
}

}  // namespace rwrt
