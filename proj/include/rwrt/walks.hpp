#pragma once

#include "rwrt/core.hpp"
#include "rwrt/random.hpp"

#include <span>
#include <string>
#include <string_view>

namespace rwrt {

enum class WalkKind { simple, beta_stable, gaussian_dependent };

std::string to_string(WalkKind kind);
WalkKind walk_kind_from_string(std::string_view name);

/// Collecting (random-time) process.  simple: +-1 steps, H' = 1/2;
/// beta_stable: rounded SbS steps, H' = 1/beta; gaussian_dependent:
/// ceiling of partial sums of fGn-H'.
struct CollectingSpec {
  WalkKind kind = WalkKind::simple;
  double beta = 2.0;
  double hurst = 0.5;

  static CollectingSpec simple() { return {}; }
  static CollectingSpec beta_stable(double beta) { return {WalkKind::beta_stable, beta, 1.0 / beta}; }
  static CollectingSpec gaussian_dependent(double hurst) { return {WalkKind::gaussian_dependent, 2.0, hurst}; }

  double hurst_prime() const;
  void validate() const;
};

struct LatticePath {
  LatticeVector positions;
  Vector underlying;  // G_{H'}(k) for the dependent walk, empty otherwise

  Index steps() const { return positions.size() - 1; }
};

LatticePath gen_walk(const CollectingSpec& spec, Index n, RandomStream& stream);

/// Positions at the requested indices only.  Consumes the stream exactly like
/// gen_walk, so the values agree with gen_walk(spec, n, copy_of_stream).
/// For the simple walk this counts bits instead of materialising the path.
LatticeVector walk_positions_at(const CollectingSpec& spec, Index n, std::span<const Index> indices,
                                RandomStream& stream);

/// Linear interpolation of an integer-indexed sequence at real t >= 0.
template <typename Derived>
double interpolate(const Eigen::DenseBase<Derived>& values, double t) {
  const Index last = values.size() - 1;
  if (!(t >= 0.0) || t > static_cast<double>(last)) {
    throw RangeError("walks", "interpolation time " + std::to_string(t) + " beyond path length " +
                                  std::to_string(last));
  }
  const auto lo = static_cast<Index>(std::floor(t));
  const double a = static_cast<double>(values.derived().coeff(lo));
  if (lo == last) return a;
  const double b = static_cast<double>(values.derived().coeff(lo + 1));
  return a + (t - static_cast<double>(lo)) * (b - a);
}

/// X_n(t) = n^{-H'} W(nt) on the uniform grid of [0, 1] with grid_steps steps
/// (grid_steps = 0 means n).
RealPath rescale(const LatticePath& path, Index n, double hurst, Index grid_steps = 0);

}  // namespace rwrt
