#pragma once

#include "rwrt/core.hpp"
#include "rwrt/random.hpp"
#include "rwrt/walks.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>

namespace rwrt {

enum class Site { edge, vertex };

std::string to_string(Site site);

/// i.i.d. rewards on Z, generated lazily: value(i) depends only on the
/// stream key and i.  Edge i is the interval [i, i+1].
class SceneryField {
 public:
  SceneryField(SceneryKind kind, double alpha, Site site, const RandomStream& stream);

  double operator()(std::int64_t i) const;
  /// Values at lo, lo+1, ..., hi (inclusive).
  Vector window(std::int64_t lo, std::int64_t hi) const;

  /// Closed-form E[eta^p]; UnsupportedError when the law has no finite closed form.
  double moment(int p) const;

  SceneryKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  Site site() const { return site_; }

 private:
  SceneryKind kind_;
  double alpha_;
  Site site_;
  std::uint64_t key_;
};

/// Rewards materialised on [lo, hi] so repeated lookups skip the generator.
class WindowedRewards {
 public:
  template <typename F>
  WindowedRewards(const F& eta, std::int64_t lo, std::int64_t hi) : lo_(lo), values_(hi - lo + 1) {
    for (std::int64_t i = lo; i <= hi; ++i) values_[i - lo] = eta(i);
  }
  double operator()(std::int64_t i) const { return values_[i - lo_]; }

 private:
  std::int64_t lo_;
  Vector values_;
};

/// sigma_e, +1 until flipped.
class EdgeSignState {
 public:
  int sign(std::int64_t e) const {
    const auto it = signs_.find(e);
    return it == signs_.end() ? 1 : it->second;
  }
  void flip(std::int64_t e) {
    auto [it, inserted] = signs_.try_emplace(e, 1);
    it->second = -it->second;
  }
  const std::unordered_map<std::int64_t, int>& touched() const { return signs_; }

 private:
  std::unordered_map<std::int64_t, int> signs_;
};

/// S(x): sum of eta(e) over edges between 0 and x, built from one ascending
/// prefix sum over [lo, hi] (lo <= 0 <= hi).
class EdgePrefix {
 public:
  template <typename F>
  EdgePrefix(const F& eta, std::int64_t lo, std::int64_t hi) : lo_(std::min<std::int64_t>(lo, 0)) {
    hi = std::max<std::int64_t>(hi, 0);
    prefix_.resize(hi - lo_ + 1);
    prefix_[0] = 0.0;
    for (std::int64_t x = lo_; x < hi; ++x) prefix_[x - lo_ + 1] = prefix_[x - lo_] + eta(x);
  }
  double operator()(std::int64_t x) const {
    const double tx = prefix_[x - lo_];
    const double t0 = prefix_[-lo_];
    return x >= 0 ? tx - t0 : t0 - tx;
  }

 private:
  std::int64_t lo_;
  Vector prefix_;
};

namespace detail {
inline std::pair<std::int64_t, std::int64_t> walk_range(const LatticeVector& walk) {
  return {std::min<std::int64_t>(walk.minCoeff(), 0), std::max<std::int64_t>(walk.maxCoeff(), 0)};
}

// Neumaier summation; running reward sums over 10^4+ steps otherwise drift
// by ~1e-9 once powers of the rewards enter.
template <typename Scalar>
struct CompensatedSum {
  Scalar sum = Scalar(0);
  Scalar carry = Scalar(0);
  void add(Scalar x) {
    using std::abs;
    const Scalar t = sum + x;
    carry += abs(sum) >= abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  Scalar value() const { return sum + carry; }
};
}  // namespace detail

// ---------------------------------------------------------------------------
// Reward processes over an arbitrary reward function eta: Z -> R
// ---------------------------------------------------------------------------

/// Z_n = sum_{k=1}^n eta(W(k)).
template <typename F>
Vector collect_vertex_rewards(const F& eta, const LatticeVector& walk) {
  const auto [lo, hi] = detail::walk_range(walk);
  const WindowedRewards w(eta, lo, hi);
  Vector z(walk.size());
  z[0] = 0.0;
  detail::CompensatedSum<double> acc;
  for (Index k = 1; k < walk.size(); ++k) {
    acc.add(w(walk[k]));
    z[k] = acc.value();
  }
  return z;
}

/// Edge RWRS: sum over steps of eta(e) for every edge e in E_k.
template <typename F>
Vector collect_edge_rewards(const F& eta, const LatticeVector& walk) {
  const auto [lo, hi] = detail::walk_range(walk);
  const WindowedRewards w(eta, lo, hi);
  Vector z(walk.size());
  z[0] = 0.0;
  detail::CompensatedSum<double> acc;
  for (Index k = 1; k < walk.size(); ++k) {
    double step = 0.0;
    for (std::int64_t e = std::min(walk[k - 1], walk[k]); e < std::max(walk[k - 1], walk[k]); ++e) step += w(e);
    acc.add(step);
    z[k] = acc.value();
  }
  return z;
}

/// A_n by the sign rule: collect sigma_e(k-1) eta(e) over E_k, then flip
/// every collected sign.
template <typename F>
Vector alternating_rewards(const F& eta, const LatticeVector& walk, EdgeSignState* state = nullptr) {
  EdgeSignState local;
  EdgeSignState& signs = state ? *state : local;
  const auto [lo, hi] = detail::walk_range(walk);
  const WindowedRewards w(eta, lo, hi);
  Vector a(walk.size());
  a[0] = 0.0;
  for (Index k = 1; k < walk.size(); ++k) {
    const std::int64_t e0 = std::min(walk[k - 1], walk[k]);
    const std::int64_t e1 = std::max(walk[k - 1], walk[k]);
    double step = 0.0;
    for (std::int64_t e = e0; e < e1; ++e) step += signs.sign(e) * w(e);
    for (std::int64_t e = e0; e < e1; ++e) signs.flip(e);
    a[k] = a[k - 1] + step;
  }
  return a;
}

/// A_n = S(W(n)).
template <typename F>
Vector prefix_rewards(const F& eta, const LatticeVector& walk) {
  const auto [lo, hi] = detail::walk_range(walk);
  const EdgePrefix s(eta, lo, hi);
  Vector a(walk.size());
  for (Index k = 0; k < walk.size(); ++k) a[k] = s(walk[k]);
  return a;
}

/// Running sum of p-th powers of increments.
template <typename Derived>
VectorX<typename Derived::Scalar> pth_variation(const Eigen::MatrixBase<Derived>& a, int p) {
  using Scalar = typename Derived::Scalar;
  if (p < 1) throw ParameterError("scenery-models", "variation order must be positive");
  VectorX<Scalar> v(a.size());
  if (a.size() == 0) return v;
  v[0] = Scalar(0);
  detail::CompensatedSum<Scalar> acc;
  for (Index i = 1; i < a.size(); ++i) {
    const Scalar d = a[i] - a[i - 1];
    Scalar dp = d;
    for (int j = 1; j < p; ++j) dp *= d;
    acc.add(dp);
    v[i] = acc.value();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Field-level entry points (site-checked)
// ---------------------------------------------------------------------------

Vector rwrs(const SceneryField& scenery, const LatticePath& walk);
Vector rwrt_signed(const SceneryField& scenery, const LatticePath& walk, EdgeSignState* state = nullptr);
Vector rwrt_indicator(const SceneryField& scenery, const LatticePath& walk);

/// max_i |a_i - b_i| / max(1, |a_i|, |b_i|).
double max_relative_deviation(const Vector& a, const Vector& b);

struct RantReport {
  int p = 1;
  bool passed = false;
  double max_deviation = 0.0;
  double moment = 0.0;  // E[eta^p]
};

/// Per-path check that V^(p) is again a reward process: odd p -> RWRT with
/// rewards eta^p; even p -> V^(p)_n - n E[eta^p] is the edge RWRS with
/// rewards eta^p - E[eta^p].  Simple walks only.
RantReport rant_check(const SceneryField& scenery, const LatticePath& walk, int p, double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Random reward schema
// ---------------------------------------------------------------------------

enum class SchemaMode { independent, single_scenery };

std::string to_string(SchemaMode mode);
SchemaMode schema_mode_from_string(std::string_view name);

struct SchemaSpec {
  SchemaMode mode = SchemaMode::independent;
  double alpha = 2.0;
  SceneryKind scenery = SceneryKind::gaussian;
  CollectingSpec walk;
  Index n = 1024;
  Index copies = 1;

  void validate() const;
};

/// c^{-1/alpha} (independent) or c^{-1} (single scenery) times
/// sum_i n^{-H} A_{nt}(eta^(i), W^(i)), H = H'/alpha, at the grid times.
RealPath schema(const SchemaSpec& spec, const TimeGrid& grid, RandomStream& stream);

}  // namespace rwrt
