#include "rwrt/scenery.hpp"

#include <cmath>
#include <vector>

namespace rwrt {

std::string to_string(Site site) { return site == Site::edge ? "edge" : "vertex"; }

SceneryField::SceneryField(SceneryKind kind, double alpha, Site site, const RandomStream& stream)
    : kind_(kind), alpha_(alpha), site_(site), key_(stream.key()) {
  validate_scenery_law(kind, alpha);
}

double SceneryField::operator()(std::int64_t i) const {
  const auto w = philox_u64x2(key_, static_cast<std::uint64_t>(i), 0);
  return scenery_from_bits(kind_, alpha_, w[0], w[1]);
}

Vector SceneryField::window(std::int64_t lo, std::int64_t hi) const {
  if (hi < lo) return Vector(0);
  Vector out(hi - lo + 1);
  for (std::int64_t i = lo; i <= hi; ++i) out[i - lo] = (*this)(i);
  return out;
}

double SceneryField::moment(int p) const {
  if (p < 1) throw ParameterError("scenery-models", "moment order must be positive");
  const bool gaussian = kind_ == SceneryKind::gaussian || (kind_ == SceneryKind::exact_stable && alpha_ == 2.0);
  if (!gaussian && kind_ != SceneryKind::rademacher) {
    throw UnsupportedError("scenery-models", "no closed-form moments for " + rwrt::to_string(kind_) +
                                                 " scenery with alpha < 2");
  }
  if (p % 2 == 1) return 0.0;
  const double two_pow = std::pow(2.0, p / 2);
  if (kind_ == SceneryKind::rademacher) return two_pow;
  // N(0, 2): (p-1)!! 2^{p/2}
  double double_factorial = 1.0;
  for (int k = p - 1; k > 1; k -= 2) double_factorial *= k;
  return double_factorial * two_pow;
}

// ---------------------------------------------------------------------------

namespace {

void require_site(const SceneryField& scenery, Site site, const char* op) {
  if (scenery.site() != site) {
    throw ParameterError("scenery-models", std::string(op) + " needs a " + to_string(site) + "-indexed scenery");
  }
}

}  // namespace

Vector rwrs(const SceneryField& scenery, const LatticePath& walk) {
  require_site(scenery, Site::vertex, "rwrs");
  return collect_vertex_rewards(scenery, walk.positions);
}

Vector rwrt_signed(const SceneryField& scenery, const LatticePath& walk, EdgeSignState* state) {
  require_site(scenery, Site::edge, "rwrt_signed");
  return alternating_rewards(scenery, walk.positions, state);
}

Vector rwrt_indicator(const SceneryField& scenery, const LatticePath& walk) {
  require_site(scenery, Site::edge, "rwrt_indicator");
  return prefix_rewards(scenery, walk.positions);
}

double max_relative_deviation(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ParameterError("scenery-models", "paths differ in length");
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

RantReport rant_check(const SceneryField& scenery, const LatticePath& walk, int p, double tolerance) {
  require_site(scenery, Site::edge, "rant_check");
  if (p < 1) throw ParameterError("scenery-models", "variation order must be positive");
  const LatticeVector& w = walk.positions;
  for (Index k = 1; k < w.size(); ++k) {
    if (std::abs(w[k] - w[k - 1]) != 1) {
      throw UnsupportedError("scenery-models", "the p-th variation identity is only established for simple walks");
    }
  }
  const double mp = scenery.moment(p);
  const auto [lo, hi] = detail::walk_range(w);
  const WindowedRewards eta(scenery, lo, hi);

  const Vector v = pth_variation(prefix_rewards(eta, w), p);
  RantReport report{p, false, 0.0, mp};
  if (p % 2 == 1) {
    const auto zeta = [&](std::int64_t e) { return std::pow(eta(e), p); };
    report.max_deviation = max_relative_deviation(v, prefix_rewards(zeta, w));
  } else {
    const auto zeta = [&](std::int64_t e) { return std::pow(eta(e), p) - mp; };
    const Vector centred = v - mp * Vector::LinSpaced(v.size(), 0.0, static_cast<double>(v.size() - 1));
    report.max_deviation = max_relative_deviation(centred, collect_edge_rewards(zeta, w));
  }
  report.passed = report.max_deviation < tolerance;
  return report;
}

// ---------------------------------------------------------------------------

std::string to_string(SchemaMode mode) {
  return mode == SchemaMode::independent ? "independent" : "single-scenery";
}

SchemaMode schema_mode_from_string(std::string_view name) {
  if (name == "independent") return SchemaMode::independent;
  if (name == "single-scenery" || name == "single") return SchemaMode::single_scenery;
  throw ParameterError("scenery-models", "unknown schema mode '" + std::string(name) + "'");
}

void SchemaSpec::validate() const {
  validate_scenery_law(scenery, alpha);
  walk.validate();
  if (mode == SchemaMode::single_scenery && !(alpha > 1.0)) {
    throw ParameterError("scenery-models", "single-scenery schema requires alpha > 1");
  }
  if (n < 1) throw ParameterError("scenery-models", "n must be positive");
  if (copies < 1) throw ParameterError("scenery-models", "c_n must be positive");
}

RealPath schema(const SchemaSpec& spec, const TimeGrid& grid, RandomStream& stream) {
  spec.validate();
  grid.validate();
  const double nd = static_cast<double>(spec.n);
  const auto length = static_cast<Index>(std::ceil(nd * grid.horizon() - 1e-9));
  if (length < 1) throw ParameterError("scenery-models", "time grid too short for the walk");

  // Interpolation nodes floor(nt), ceil(nt) for every grid time.
  std::vector<Index> nodes;
  std::vector<double> frac(static_cast<std::size_t>(grid.points()));
  for (Index k = 0; k < grid.points(); ++k) {
    const double nt = std::min(nd * grid.at(k), static_cast<double>(length));
    const double fl = std::floor(nt);
    frac[static_cast<std::size_t>(k)] = nt - fl;
    nodes.push_back(static_cast<Index>(fl));
    nodes.push_back(std::min(static_cast<Index>(fl) + 1, length));
  }

  const double hurst = spec.walk.hurst_prime() / spec.alpha;
  const double path_scale = std::pow(nd, -hurst);
  const double copies = static_cast<double>(spec.copies);
  const double norm = spec.mode == SchemaMode::independent ? std::pow(copies, -1.0 / spec.alpha) : 1.0 / copies;

  std::vector<LatticeVector> positions(static_cast<std::size_t>(spec.copies));
  for (Index i = 0; i < spec.copies; ++i) {
    RandomStream walk_stream = stream.child("walk", static_cast<std::uint64_t>(i));
    positions[static_cast<std::size_t>(i)] = walk_positions_at(spec.walk, length, nodes, walk_stream);
  }

  const auto accumulate = [&](const EdgePrefix& s, const LatticeVector& pos, Vector& acc) {
    for (Index k = 0; k < grid.points(); ++k) {
      const double a0 = s(pos[2 * k]);
      const double a1 = s(pos[2 * k + 1]);
      acc[k] += a0 + frac[static_cast<std::size_t>(k)] * (a1 - a0);
    }
  };

  Vector total = Vector::Zero(grid.points());
  if (spec.mode == SchemaMode::independent) {
    for (Index i = 0; i < spec.copies; ++i) {
      const LatticeVector& pos = positions[static_cast<std::size_t>(i)];
      const SceneryField eta(spec.scenery, spec.alpha, Site::edge, stream.child("scenery", static_cast<std::uint64_t>(i)));
      accumulate(EdgePrefix(eta, pos.minCoeff(), pos.maxCoeff()), pos, total);
    }
  } else {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    for (const auto& pos : positions) {
      lo = std::min(lo, pos.minCoeff());
      hi = std::max(hi, pos.maxCoeff());
    }
    const SceneryField eta(spec.scenery, spec.alpha, Site::edge, stream.child("scenery", 0));
    const EdgePrefix s(eta, lo, hi);
    for (const auto& pos : positions) accumulate(s, pos, total);
  }
  return RealPath(grid.dt, norm * path_scale * total);
}

}  // namespace rwrt
