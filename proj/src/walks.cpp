#include "rwrt/walks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

namespace rwrt {

std::string to_string(WalkKind kind) {
  switch (kind) {
    case WalkKind::simple:
      return "simple";
    case WalkKind::beta_stable:
      return "beta-stable";
    case WalkKind::gaussian_dependent:
      return "gaussian-dependent";
  }
  return "?";
}

WalkKind walk_kind_from_string(std::string_view name) {
  if (name == "simple") return WalkKind::simple;
  if (name == "beta-stable") return WalkKind::beta_stable;
  if (name == "gaussian-dependent") return WalkKind::gaussian_dependent;
  throw ParameterError("walks", "unknown walk kind '" + std::string(name) + "'");
}

double CollectingSpec::hurst_prime() const {
  switch (kind) {
    case WalkKind::simple:
      return 0.5;
    case WalkKind::beta_stable:
      return 1.0 / beta;
    case WalkKind::gaussian_dependent:
      return hurst;
  }
  return 0.5;
}

void CollectingSpec::validate() const {
  if (kind == WalkKind::beta_stable && !(beta > 1.0 && beta <= 2.0)) {
    throw ParameterError("walks", "beta must lie in (1, 2]");
  }
  if (kind == WalkKind::gaussian_dependent && !(hurst > 0.0 && hurst < 1.0)) {
    throw ParameterError("walks", "H' must lie in (0, 1)");
  }
}

namespace {

// Step k (1-based) of the simple walk is +1 iff bit (k-1) % 64 of word (k-1) / 64 is set.
LatticeVector simple_walk(Index n, RandomStream& stream) {
  LatticeVector pos(n + 1);
  pos[0] = 0;
  std::uint64_t word = 0;
  for (Index k = 1; k <= n; ++k) {
    const Index bit = (k - 1) % 64;
    if (bit == 0) word = stream.next_u64();
    pos[k] = pos[k - 1] + (((word >> bit) & 1u) ? 1 : -1);
  }
  return pos;
}

}  // namespace

LatticePath gen_walk(const CollectingSpec& spec, Index n, RandomStream& stream) {
  spec.validate();
  if (n < 1) throw ParameterError("walks", "walk length must be positive");
  LatticePath out;
  switch (spec.kind) {
    case WalkKind::simple:
      out.positions = simple_walk(n, stream);
      break;
    case WalkKind::beta_stable: {
      const StableParams params{spec.beta, 1.0};
      out.positions.resize(n + 1);
      out.positions[0] = 0;
      for (Index k = 1; k <= n; ++k) {
        out.positions[k] = out.positions[k - 1] + static_cast<std::int64_t>(std::llround(sample_sas(params, stream)));
      }
      break;
    }
    case WalkKind::gaussian_dependent: {
      const Vector noise = gen_fgn(spec.hurst, n, stream);
      out.underlying.resize(n + 1);
      out.positions.resize(n + 1);
      out.underlying[0] = 0.0;
      out.positions[0] = 0;
      for (Index k = 1; k <= n; ++k) {
        out.underlying[k] = out.underlying[k - 1] + noise[k - 1];
        out.positions[k] = static_cast<std::int64_t>(std::ceil(out.underlying[k]));
      }
      break;
    }
  }
  return out;
}

LatticeVector walk_positions_at(const CollectingSpec& spec, Index n, std::span<const Index> indices,
                                RandomStream& stream) {
  for (const Index k : indices)
    if (k < 0 || k > n) throw RangeError("walks", "requested index outside the walk");
  LatticeVector out(static_cast<Index>(indices.size()));
  if (spec.kind != WalkKind::simple) {
    const LatticePath path = gen_walk(spec, n, stream);
    for (std::size_t i = 0; i < indices.size(); ++i) out[static_cast<Index>(i)] = path.positions[indices[i]];
    return out;
  }
  if (n < 1) throw ParameterError("walks", "walk length must be positive");

  // Running count of up-steps at every 64-step boundary.
  const Index words = (n + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(words));
  std::vector<std::int64_t> ups(static_cast<std::size_t>(words) + 1, 0);
  for (Index w = 0; w < words; ++w) {
    bits[static_cast<std::size_t>(w)] = stream.next_u64();
    ups[static_cast<std::size_t>(w) + 1] = ups[static_cast<std::size_t>(w)] + std::popcount(bits[static_cast<std::size_t>(w)]);
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Index k = indices[i];
    const auto w = static_cast<std::size_t>(k / 64);
    const Index r = k % 64;
    std::int64_t up = ups[w];
    if (r > 0) up += std::popcount(bits[w] & ((std::uint64_t{1} << r) - 1));
    out[static_cast<Index>(i)] = 2 * up - k;
  }
  return out;
}

RealPath rescale(const LatticePath& path, Index n, double hurst, Index grid_steps) {
  if (n < 1) throw ParameterError("walks", "scaling index must be positive");
  if (path.steps() < n) throw RangeError("walks", "path shorter than the scaling index");
  if (grid_steps == 0) grid_steps = n;
  const TimeGrid grid = TimeGrid::unit(grid_steps);
  const double scale = std::pow(static_cast<double>(n), -hurst);
  Vector values(grid.points());
  for (Index k = 0; k <= grid_steps; ++k) {
    // nt computed exactly for dyadic grids; clamp guards rounding at t = 1
    const double nt = std::min(static_cast<double>(n) * static_cast<double>(k) / static_cast<double>(grid_steps),
                               static_cast<double>(n));
    values[k] = scale * interpolate(path.positions, nt);
  }
  return RealPath(grid.dt, std::move(values));
}

}  // namespace rwrt
