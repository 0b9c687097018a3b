#include "rwrt/time_change.hpp"

#include "rwrt/stable_measure.hpp"

#include <algorithm>
#include <cmath>

namespace rwrt {

namespace {

void check_level(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("time-change", "levels must be positive");
}

}  // namespace

std::optional<double> hitting_time(const RealPath& y, double s) {
  check_level(s);
  const Vector& v = y.values;
  for (Index k = 0; k + 1 < v.size(); ++k) {
    if (v[k + 1] >= s && v[k] < s) {
      return y.dt * (static_cast<double>(k) + (s - v[k]) / (v[k + 1] - v[k]));
    }
    if (v[k] >= s) return y.dt * static_cast<double>(k);
  }
  return std::nullopt;
}

std::optional<double> hitting_time(const Vector& times, const Vector& values, double s) {
  check_level(s);
  double t0 = 0.0;
  double y0 = 0.0;
  for (Index k = 0; k < values.size(); ++k) {
    if (values[k] >= s) return t0 + (times[k] - t0) * (s - y0) / (values[k] - y0);
    t0 = times[k];
    y0 = values[k];
  }
  return std::nullopt;
}

HittingTimeMap HittingTimeMap::build(const Vector& times, const Vector& values, const Vector& levels) {
  HittingTimeMap m{levels, {}, Vector::Zero(levels.size())};
  for (Index i = 0; i < levels.size(); ++i) {
    m.taus.push_back(hitting_time(times, values, levels[i]));
    if (m.taus.back()) {
      for (Index k = 0; k < values.size(); ++k) {
        if (values[k] >= levels[i]) {
          m.overshoot[i] = values[k] - levels[i];
          break;
        }
      }
    }
  }
  return m;
}

HittingTimeMap HittingTimeMap::build(const RealPath& y, const Vector& levels) {
  const Index n = y.steps();
  return build(y.times().tail(n), y.values.tail(n), levels);
}

bool HittingTimeMap::all_reached() const {
  return std::all_of(taus.begin(), taus.end(), [](const auto& t) { return t.has_value(); });
}

// ---------------------------------------------------------------------------

void ExtractSpec::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("time-change", "H' must lie in (0, 1)");
  if (levels.size() < 1) throw ParameterError("time-change", "no levels");
  for (Index i = 0; i < levels.size(); ++i) {
    check_level(levels[i]);
    if (i > 0 && !(levels[i] > levels[i - 1])) throw ParameterError("time-change", "levels must increase");
  }
  if (replicates < 3) throw ParameterError("time-change", "need at least three replicates");
  if (copies < 1) throw ParameterError("time-change", "M must be positive");
  if (!(cell_width > 0.0)) throw ParameterError("time-change", "cell width must be positive");
}

namespace {

// Linear interpolant at tau: equals the level up to rounding, since tau is
// the interpolated crossing.
double value_at(const Vector& times, const Vector& values, double tau) {
  double t0 = 0.0;
  double y0 = 0.0;
  for (Index k = 0; k < values.size(); ++k) {
    if (times[k] >= tau) return y0 + (values[k] - y0) * (tau - t0) / (times[k] - t0);
    t0 = times[k];
    y0 = values[k];
  }
  return y0;
}

// Kernel endpoints Y_{tau_s} for one path; false when a level is missed.
bool time_changed_levels(const FbmSampler& sampler, const Vector& levels, RandomStream& stream, Vector& ends,
                         std::vector<double>& overshoot) {
  const Vector values = sampler.sample(stream, levels[levels.size() - 1]);
  const Vector times = sampler.times().head(values.size());
  const HittingTimeMap map = HittingTimeMap::build(times, values, levels);
  if (!map.all_reached()) return false;
  for (Index i = 0; i < levels.size(); ++i) ends[i] = value_at(times, values, *map.taus[static_cast<std::size_t>(i)]);
  overshoot.push_back(map.overshoot.maxCoeff());
  return true;
}

void finish(ExtractReport& rep, std::vector<Vector>& kept, std::vector<double>& overshoot) {
  const auto n = static_cast<Index>(kept.size());
  const Index k = rep.levels.size();
  rep.samples.resize(n, k);
  for (Index r = 0; r < n; ++r) rep.samples.row(r) = kept[static_cast<std::size_t>(r)].transpose();
  rep.drop_rate = static_cast<double>(rep.dropped) / static_cast<double>(rep.replicates);
  if (!overshoot.empty()) {
    const auto mid = overshoot.begin() + static_cast<std::ptrdiff_t>(overshoot.size() / 2);
    std::nth_element(overshoot.begin(), mid, overshoot.end());
    rep.median_overshoot = *mid;
  }
  if (n < 3) throw NumericError("time-change", "too few replicates reached every level");
  rep.cov = cov_matrix(rep.samples);
  rep.target_cov.resize(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) rep.target_cov(i, j) = rep.convention_factor * std::min(rep.levels[i], rep.levels[j]);
}

}  // namespace

ExtractReport extract_bm_minus(const ExtractSpec& spec, const RandomStream& stream) {
  spec.validate();
  const FbmSampler sampler(spec.hurst, log_time_grid(spec.t_min, spec.t_max, spec.log_step));
  ExtractReport rep;
  rep.mode = "minus";
  rep.levels = spec.levels;
  rep.replicates = spec.replicates;
  std::vector<Vector> kept;
  std::vector<double> overshoot;
  Vector ends(spec.levels.size());
  for (Index r = 0; r < spec.replicates; ++r) {
    const RandomStream rs = stream.child("replicate", static_cast<std::uint64_t>(r));
    RandomStream driver = rs.child("driver");
    if (!time_changed_levels(sampler, spec.levels, driver, ends, overshoot)) {
      ++rep.dropped;
      continue;
    }
    const MeasureGrid1D m0(2.0, spec.cell_width, 4.0 * ends.maxCoeff(), rs.child("measure"));
    RowPrefix row = m0.prefix();
    Vector x(spec.levels.size());
    for (Index i = 0; i < x.size(); ++i) x[i] = row.indicator(0.0, ends[i]);
    kept.push_back(std::move(x));
  }
  finish(rep, kept, overshoot);
  return rep;
}

ExtractReport extract_bm_times(const ExtractSpec& spec, const RandomStream& stream) {
  spec.validate();
  const FbmSampler sampler(spec.hurst, log_time_grid(spec.t_min, spec.t_max, spec.log_step));
  ExtractReport rep;
  rep.mode = "times";
  rep.levels = spec.levels;
  rep.replicates = spec.replicates;
  std::vector<Vector> kept;
  std::vector<double> overshoot;
  const Index k = spec.levels.size();
  Matrix ends(spec.copies, k);
  Vector e(k);
  for (Index r = 0; r < spec.replicates; ++r) {
    const RandomStream rs = stream.child("replicate", static_cast<std::uint64_t>(r));
    bool ok = true;
    std::vector<double> copy_overshoot;
    for (Index i = 0; i < spec.copies && ok; ++i) {
      RandomStream driver = rs.child("copy", static_cast<std::uint64_t>(i));
      ok = time_changed_levels(sampler, spec.levels, driver, e, copy_overshoot);
      ends.row(i) = e.transpose();
    }
    if (!ok) {
      ++rep.dropped;
      continue;
    }
    overshoot.push_back(*std::max_element(copy_overshoot.begin(), copy_overshoot.end()));
    const ProductMeasureGrid m1(2.0, spec.copies, spec.cell_width, 4.0 * ends.maxCoeff(), rs.child("measure"));
    Vector x = Vector::Zero(k);
    for (Index i = 0; i < spec.copies; ++i) {
      RowPrefix row = m1.prefix(i);
      for (Index j = 0; j < k; ++j) x[j] += row.indicator(0.0, ends(i, j));
    }
    kept.push_back(std::move(x));
  }
  finish(rep, kept, overshoot);
  if (k >= 2) {
    const Vector pair = (rep.samples.col(0) + rep.samples.col(1)).array().square();
    const auto est = mean_with_stderr(pair);
    rep.pair_second_moment = est.mean;
    rep.pair_second_moment_stderr = est.stderr_;
    rep.pair_second_moment_target = rep.convention_factor * (3.0 * spec.levels[0] + spec.levels[1]);
  }
  return rep;
}

}  // namespace rwrt
