#pragma once

#include "rwrt/core.hpp"
#include "rwrt/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace rwrt {

/// count bins of equal width starting at lo.
struct Bins {
  double lo = 0.0;
  double width = 1.0;
  Index count = 1;

  double hi() const { return lo + width * static_cast<double>(count); }
  double edge(Index k) const { return lo + width * static_cast<double>(k); }
  Index locate(double x) const {
    const auto k = static_cast<Index>(std::floor((x - lo) / width));
    return std::clamp<Index>(k, 0, count - 1);
  }

  /// Bins of the given width covering [a, b], edges on multiples of width.
  static Bins aligned(double a, double b, double width);
};

/// Splits the time mass of the linear segment y0 -> y1 across the bins it
/// crosses, proportionally to the length inside each bin; sink(bin, mass).
template <typename Sink>
void deposit_segment(double y0, double y1, double mass, const Bins& bins, Sink&& sink) {
  if (y0 == y1) {
    sink(bins.locate(y0), mass);
    return;
  }
  const double lo = std::min(y0, y1);
  const double hi = std::max(y0, y1);
  const double inv_len = 1.0 / (hi - lo);
  const Index k0 = bins.locate(lo);
  const Index k1 = bins.locate(hi);
  if (k0 == k1) {
    sink(k0, mass);
    return;
  }
  for (Index k = k0; k <= k1; ++k) {
    const double a = k == k0 ? lo : bins.edge(k);
    const double b = k == k1 ? hi : bins.edge(k + 1);
    if (b > a) sink(k, mass * (b - a) * inv_len);
  }
}

struct LocalTimeProfile {
  Bins bins;
  Vector values;  // occupation density per bin
  double horizon = 0.0;

  double mass() const { return values.sum() * bins.width; }
  /// Integral of the density over [a, b] (partial bins pro rata).
  double integral(double a, double b) const;
  /// sum values^2 * width, the discrete version of int l(t,x)^2 dx.
  double l2() const { return values.squaredNorm() * bins.width; }
};

/// Occupation density of the linear interpolant of path over its whole
/// horizon.  width <= 0 selects (path range)/256.  Bins are extended if the
/// path leaves them.
LocalTimeProfile local_time(const RealPath& path, double width = 0.0);
LocalTimeProfile local_time(const RealPath& path, const Bins& bins);

/// Time the linear interpolant spends in [a, b].
double occupation_time(const RealPath& path, double a, double b);

// ---------------------------------------------------------------------------

enum class DriverKind { fbm, levy };

/// Random-time process Y: fBm-H' or symmetric beta-stable Levy motion
/// (exact SbS increments, H' = 1/beta).
struct DriverSpec {
  DriverKind kind = DriverKind::fbm;
  double hurst = 0.5;
  double beta = 2.0;

  static DriverSpec brownian() { return {}; }
  static DriverSpec fbm(double h) { return {DriverKind::fbm, h, 2.0}; }
  static DriverSpec levy(double beta) { return {DriverKind::levy, 1.0 / beta, beta}; }

  double hurst_prime() const { return kind == DriverKind::fbm ? hurst : 1.0 / beta; }
  void validate() const;
  RealPath sample(const TimeGrid& grid, RandomStream& stream) const;
};

enum class Flavor { delta, gamma, lambda };
enum class KernelKind { indicator, localtime };

std::string to_string(Flavor f);
std::string to_string(KernelKind k);
Flavor flavor_from_string(std::string_view name);
KernelKind kernel_from_string(std::string_view name);

struct LimitSpec {
  Flavor flavor = Flavor::delta;
  KernelKind kernel = KernelKind::indicator;
  double alpha = 2.0;
  DriverSpec driver;
  Index copies = 1024;          // M, gamma / lambda
  double cell_width = 1.0 / 256.0;
  Index driver_steps = 4096;    // driver resolution for local-time kernels
  bool exact_mean_kernel = false;  // lambda + indicator + fBm driver: E' kernel in closed form

  void validate() const;
};

/// Stable integrals of the indicator or local-time kernels of the given
/// driver paths, read off every `ratio` path steps.  delta: one path, M0;
/// gamma: one product-grid row per path; lambda: path-averaged kernel, M0.
/// Measure draws come from stream.child("measure").
Vector integrate_kernels(const std::vector<RealPath>& paths, Flavor flavor, KernelKind kernel, double alpha,
                         double cell_width, Index ratio, RandomStream& stream);

/// One sampled path of the limit process at the grid times.
RealPath simulate_limit(const LimitSpec& spec, const TimeGrid& grid, RandomStream& stream);

/// localtime: 1 - H' + H'/alpha; indicator: H'/alpha.
double hurst_target(double alpha, double hurst_prime, KernelKind kernel);

/// P(Y_t >= x) for x > 0, fBm: the closed-form E' 1_[0, Y_t](x).
double mean_indicator_kernel(double x, double t, double hurst);

struct ScalingReport {
  double c = 1.0;
  double target = 1.0;
  double ratio = 1.0;
  double ratio_stderr = 0.0;
  double mean_scaled = 0.0;
  double mean_unit = 0.0;
  double stderr_scaled = 0.0;
  double stderr_unit = 0.0;
  bool passed = false;
};

/// E int l(c, x)^2 dx against c^{2(1-H') + H'} E int l(1, x)^2 dx, bins of
/// width (path range)/256 on both sides.
ScalingReport localtime_scaling_check(const DriverSpec& driver, double c, Index replicates, Index steps,
                                      RandomStream& stream);

}  // namespace rwrt
