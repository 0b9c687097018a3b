#include "rwrt/limits.hpp"

#include "rwrt/stable_measure.hpp"
#include "rwrt/stats.hpp"

#include <numbers>
#include <vector>

namespace rwrt {

Bins Bins::aligned(double a, double b, double width) {
  if (!(width > 0.0)) throw ParameterError("limit-processes", "bin width must be positive");
  if (b < a) std::swap(a, b);
  const double lo = std::floor(a / width) * width;
  const auto count = static_cast<Index>(std::floor((b - lo) / width)) + 1;
  return Bins{lo, width, count};
}

double LocalTimeProfile::integral(double a, double b) const {
  if (b < a) std::swap(a, b);
  double out = 0.0;
  for (Index k = 0; k < bins.count; ++k) {
    const double overlap = std::min(b, bins.edge(k + 1)) - std::max(a, bins.edge(k));
    if (overlap > 0.0) out += overlap * values[k];
  }
  return out;
}

LocalTimeProfile local_time(const RealPath& path, double width) {
  const double lo = path.values.minCoeff();
  const double hi = path.values.maxCoeff();
  if (width <= 0.0) width = hi > lo ? (hi - lo) / 256.0 : 1.0;
  return local_time(path, Bins::aligned(lo, hi, width));
}

LocalTimeProfile local_time(const RealPath& path, const Bins& requested) {
  if (path.values.size() < 2) throw ParameterError("limit-processes", "local time needs at least one step");
  Bins bins = requested;
  const double lo = path.values.minCoeff();
  const double hi = path.values.maxCoeff();
  // automatic extension, keeping the bin edges
  if (lo < bins.lo) {
    const auto extra = static_cast<Index>(std::ceil((bins.lo - lo) / bins.width));
    bins.lo -= static_cast<double>(extra) * bins.width;
    bins.count += extra;
  }
  if (hi >= bins.hi()) bins.count += static_cast<Index>(std::floor((hi - bins.hi()) / bins.width)) + 1;

  LocalTimeProfile out{bins, Vector::Zero(bins.count), path.horizon()};
  const double inv_w = 1.0 / bins.width;
  for (Index s = 0; s < path.steps(); ++s) {
    deposit_segment(path.values[s], path.values[s + 1], path.dt, bins,
                    [&](Index k, double m) { out.values[k] += m * inv_w; });
  }
  return out;
}

double occupation_time(const RealPath& path, double a, double b) {
  if (b < a) std::swap(a, b);
  double total = 0.0;
  for (Index s = 0; s < path.steps(); ++s) {
    const double y0 = path.values[s];
    const double y1 = path.values[s + 1];
    if (y0 == y1) {
      if (y0 >= a && y0 <= b) total += path.dt;
      continue;
    }
    const double lo = std::min(y0, y1);
    const double hi = std::max(y0, y1);
    const double overlap = std::min(hi, b) - std::max(lo, a);
    if (overlap > 0.0) total += path.dt * overlap / (hi - lo);
  }
  return total;
}

// ---------------------------------------------------------------------------

void DriverSpec::validate() const {
  if (kind == DriverKind::fbm && !(hurst > 0.0 && hurst < 1.0)) {
    throw ParameterError("limit-processes", "fBm driver needs H' in (0, 1)");
  }
  if (kind == DriverKind::levy && !(beta > 0.0 && beta <= 2.0)) {
    throw ParameterError("limit-processes", "Levy driver needs beta in (0, 2]");
  }
}

RealPath DriverSpec::sample(const TimeGrid& grid, RandomStream& stream) const {
  validate();
  if (kind == DriverKind::fbm) return gen_fbm_path(hurst, grid, stream);
  const StableParams params{beta, std::pow(grid.dt, 1.0 / beta)};
  Vector values(grid.points());
  values[0] = 0.0;
  for (Index k = 1; k < grid.points(); ++k) values[k] = values[k - 1] + sample_sas(params, stream);
  return RealPath(grid.dt, std::move(values));
}

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::delta:
      return "delta";
    case Flavor::gamma:
      return "gamma";
    case Flavor::lambda:
      return "lambda";
  }
  return "?";
}

std::string to_string(KernelKind k) { return k == KernelKind::indicator ? "indicator" : "localtime"; }

Flavor flavor_from_string(std::string_view name) {
  if (name == "delta") return Flavor::delta;
  if (name == "gamma") return Flavor::gamma;
  if (name == "lambda") return Flavor::lambda;
  throw ParameterError("limit-processes", "unknown flavor '" + std::string(name) + "'");
}

KernelKind kernel_from_string(std::string_view name) {
  if (name == "indicator") return KernelKind::indicator;
  if (name == "localtime" || name == "local-time") return KernelKind::localtime;
  throw ParameterError("limit-processes", "unknown kernel '" + std::string(name) + "'");
}

void LimitSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("limit-processes", "alpha must lie in (0, 2]");
  if (flavor == Flavor::lambda && !(alpha > 1.0)) {
    throw ParameterError("limit-processes", "the lambda flavor requires alpha in (1, 2]");
  }
  driver.validate();
  if (flavor != Flavor::delta && copies < 1) throw ParameterError("limit-processes", "M must be positive");
  if (!(cell_width > 0.0)) throw ParameterError("limit-processes", "cell width must be positive");
  if (driver_steps < 1) throw ParameterError("limit-processes", "driver resolution must be positive");
  if (exact_mean_kernel &&
      (flavor != Flavor::lambda || kernel != KernelKind::indicator || driver.kind != DriverKind::fbm)) {
    throw ParameterError("limit-processes", "closed-form mean kernel needs lambda, indicator kernel, fBm driver");
  }
}

double hurst_target(double alpha, double hurst_prime, KernelKind kernel) {
  return kernel == KernelKind::localtime ? 1.0 - hurst_prime + hurst_prime / alpha : hurst_prime / alpha;
}

double mean_indicator_kernel(double x, double t, double hurst) {
  if (t <= 0.0) return 0.0;
  return 0.5 * std::erfc(std::abs(x) / std::pow(t, hurst) / std::numbers::sqrt2);
}

namespace {

// int_{u0}^{u1} Q(u) du for 0 <= u0 <= u1, via the antiderivative u Q(u) - phi(u).
double tail_integral(double u0, double u1) {
  const auto g = [](double u) {
    const double q = 0.5 * std::erfc(u / std::numbers::sqrt2);
    const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    return u * q - phi;
  };
  return g(u1) - g(u0);
}

double sup_abs(const std::vector<RealPath>& paths) {
  double sup = 1.0;
  for (const auto& p : paths) sup = std::max(sup, p.values.cwiseAbs().maxCoeff());
  return sup;
}

Vector exact_mean_indicator(const LimitSpec& spec, const TimeGrid& grid, RandomStream& stream) {
  const double h = spec.cell_width;
  const double scale = std::pow(grid.horizon(), spec.driver.hurst);
  const auto cells = static_cast<std::int64_t>(std::ceil(8.5 * scale / h));
  const MeasureGrid1D m0(spec.alpha, h, static_cast<double>(cells) * h, stream.child("measure"));
  Vector draws(2 * cells);
  for (std::int64_t j = -cells; j < cells; ++j) draws[j + cells] = m0.draw(j);
  Vector out = Vector::Zero(grid.points());
  for (Index k = 1; k < grid.points(); ++k) {
    const double s = std::pow(grid.at(k), spec.driver.hurst);
    double acc = 0.0;
    for (std::int64_t j = 0; j < cells; ++j) {
      const double c = s * tail_integral(static_cast<double>(j) * h / s, static_cast<double>(j + 1) * h / s) / h;
      acc += c * (draws[cells + j] + draws[cells - 1 - j]);
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

Vector integrate_kernels(const std::vector<RealPath>& paths, Flavor flavor, KernelKind kernel, double alpha,
                         double cell_width, Index ratio, RandomStream& stream) {
  if (paths.empty()) throw ParameterError("limit-processes", "no driver paths");
  if (flavor == Flavor::delta && paths.size() != 1) throw ParameterError("limit-processes", "delta uses one path");
  if (ratio < 1 || paths.front().steps() % ratio != 0) {
    throw ParameterError("limit-processes", "output stride must divide the path length");
  }
  const auto copies = static_cast<Index>(paths.size());
  const double h = cell_width;
  const Index points = paths.front().steps() / ratio + 1;
  const double half_width = 4.0 * sup_abs(paths);
  const double weight = flavor == Flavor::lambda ? 1.0 / static_cast<double>(copies) : 1.0;
  Vector out = Vector::Zero(points);

  if (kernel == KernelKind::indicator) {
    if (flavor == Flavor::gamma) {
      const ProductMeasureGrid m1(alpha, copies, h, half_width, stream.child("measure"));
      for (Index i = 0; i < copies; ++i) {
        RowPrefix row = m1.prefix(i);
        const Vector& y = paths[static_cast<std::size_t>(i)].values;
        for (Index k = 1; k < points; ++k) out[k] += row.indicator(0.0, y[k * ratio]);
      }
    } else {
      const MeasureGrid1D m0(alpha, h, half_width, stream.child("measure"));
      RowPrefix row = m0.prefix();
      for (const auto& p : paths)
        for (Index k = 1; k < points; ++k) out[k] += weight * row.indicator(0.0, p.values[k * ratio]);
    }
    return out;
  }

  const MeasureGrid1D m0(alpha, h, half_width, stream.child("measure"));
  const ProductMeasureGrid m1(alpha, copies, h, half_width, stream.child("measure"));
  for (Index i = 0; i < copies; ++i) {
    const RealPath& path = paths[static_cast<std::size_t>(i)];
    const Vector& y = path.values;
    // bins = measure cells over the path range
    const Bins bins = Bins::aligned(y.minCoeff(), y.maxCoeff(), h);
    const auto j0 = static_cast<std::int64_t>(std::llround(bins.lo / h));
    Vector draws(bins.count);
    if (flavor == Flavor::gamma) {
      const CellRow row = m1.row(i);
      for (Index k = 0; k < bins.count; ++k) draws[k] = row(j0 + k);
    } else {
      for (Index k = 0; k < bins.count; ++k) draws[k] = m0.draw(j0 + k);
    }
    draws *= weight / h;
    double acc = 0.0;
    for (Index s = 0; s < path.steps(); ++s) {
      deposit_segment(y[s], y[s + 1], path.dt, bins, [&](Index k, double m) { acc += m * draws[k]; });
      if ((s + 1) % ratio == 0) out[(s + 1) / ratio] += acc;
    }
  }
  return out;
}

RealPath simulate_limit(const LimitSpec& spec, const TimeGrid& grid, RandomStream& stream) {
  spec.validate();
  grid.validate();
  if (spec.exact_mean_kernel) return RealPath(grid.dt, exact_mean_indicator(spec, grid, stream));

  const Index copies = spec.flavor == Flavor::delta ? 1 : spec.copies;
  Index ratio = 1;
  if (spec.kernel == KernelKind::localtime) ratio = std::max<Index>(1, (spec.driver_steps + grid.steps - 1) / grid.steps);
  const TimeGrid fine{grid.dt / static_cast<double>(ratio), grid.steps * ratio};
  std::vector<RealPath> paths;
  paths.reserve(static_cast<std::size_t>(copies));
  for (Index i = 0; i < copies; ++i) {
    RandomStream s = stream.child("driver", static_cast<std::uint64_t>(i));
    paths.push_back(spec.driver.sample(fine, s));
  }
  return RealPath(grid.dt, integrate_kernels(paths, spec.flavor, spec.kernel, spec.alpha, spec.cell_width, ratio, stream));
}

ScalingReport localtime_scaling_check(const DriverSpec& driver, double c, Index replicates, Index steps,
                                      RandomStream& stream) {
  driver.validate();
  if (!(c > 0.0)) throw ParameterError("limit-processes", "scale factor must be positive");
  if (replicates < 2) throw ParameterError("limit-processes", "need at least two replicates");
  const double hp = driver.hurst_prime();
  ScalingReport out;
  out.c = c;
  out.target = std::pow(c, 2.0 * (1.0 - hp) + hp);

  Vector scaled(replicates);
  Vector unit(replicates);
  for (Index r = 0; r < replicates; ++r) {
    RandomStream sa = stream.child("scaled", static_cast<std::uint64_t>(r));
    RandomStream sb = stream.child("unit", static_cast<std::uint64_t>(r));
    scaled[r] = local_time(driver.sample(TimeGrid::span(c, steps), sa)).l2();
    unit[r] = local_time(driver.sample(TimeGrid::span(1.0, steps), sb)).l2();
  }
  const auto a = mean_with_stderr(scaled);
  const auto b = mean_with_stderr(unit);
  out.mean_scaled = a.mean;
  out.mean_unit = b.mean;
  out.stderr_scaled = a.stderr_;
  out.stderr_unit = b.stderr_;
  out.ratio = a.mean / b.mean;
  out.ratio_stderr = out.ratio * std::hypot(a.stderr_ / a.mean, b.stderr_ / b.mean);
  const double combined = std::hypot(a.stderr_, out.target * b.stderr_);
  out.passed = std::abs(a.mean - out.target * b.mean) <= 3.0 * combined;
  return out;
}

}  // namespace rwrt
