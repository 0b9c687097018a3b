#include "rwrt/core.hpp"

#include <cmath>

namespace rwrt {

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("grid", "dt must be positive");
  if (steps < 1) throw ParameterError("grid", "grid needs at least one step");
}

Index TimeGrid::index_of(double t) const {
  const double k = t / dt;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 0 ||
      rounded > static_cast<double>(steps)) {
    throw RangeError("grid", "time " + std::to_string(t) + " is not a grid node");
  }
  return static_cast<Index>(rounded);
}

double RealPath::at(double t) const {
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12)) {
    throw RangeError("walks", "time " + std::to_string(t) + " outside path horizon");
  }
  const double x = std::min(t / dt, static_cast<double>(steps()));
  const auto lo = static_cast<Index>(std::floor(x));
  if (lo >= steps()) return values[steps()];
  const double frac = x - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace rwrt
