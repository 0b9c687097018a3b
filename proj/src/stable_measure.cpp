#include "rwrt/stable_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwrt {

double RowPrefix::prefix(std::int64_t j) {
  if (j >= 0) {
    while (static_cast<std::int64_t>(pos_.size()) <= j) {
      const auto k = static_cast<std::int64_t>(pos_.size()) - 1;
      pos_.push_back(pos_.back() + cell_(k));
    }
    return pos_[static_cast<std::size_t>(j)];
  }
  const std::int64_t m = -j;
  while (static_cast<std::int64_t>(neg_.size()) <= m) {
    const auto k = static_cast<std::int64_t>(neg_.size());
    neg_.push_back(neg_.back() + cell_(-k));
  }
  return -neg_[static_cast<std::size_t>(m)];
}

double RowPrefix::indicator(double a, double b) {
  if (a > b) std::swap(a, b);
  if (a == b) return 0.0;
  const auto ja = static_cast<std::int64_t>(std::floor(a / h_));
  const auto jb = static_cast<std::int64_t>(std::floor(b / h_));
  if (ja == jb) return (b - a) / h_ * cell_(ja);
  double out = ((static_cast<double>(ja + 1) * h_ - a) / h_) * cell_(ja);
  out += prefix(jb) - prefix(ja + 1);
  const double tail = (b - static_cast<double>(jb) * h_) / h_;
  if (tail > 0.0) out += tail * cell_(jb);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_grid(double alpha, double h, double half_width) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("stable-measure", "alpha must lie in (0, 2]");
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("stable-measure", "cell width must be positive");
  if (!(half_width > 0.0)) throw ParameterError("stable-measure", "domain half-width must be positive");
}

}  // namespace

MeasureGrid1D::MeasureGrid1D(double alpha, double h, double half_width, const RandomStream& stream)
    : alpha_(alpha), h_(h), half_width_(half_width), row_(alpha, std::pow(h, 1.0 / alpha), stream.key(), 0) {
  check_grid(alpha, h, half_width);
}

std::int64_t MeasureGrid1D::first_cell() const { return static_cast<std::int64_t>(std::floor(-half_width_ / h_)); }
std::int64_t MeasureGrid1D::last_cell() const { return static_cast<std::int64_t>(std::ceil(half_width_ / h_)) - 1; }

RowPrefix MeasureGrid1D::prefix() const { return RowPrefix(row_, h_); }

Vector MeasureGrid1D::draws() const {
  const std::int64_t lo = first_cell();
  Vector out(last_cell() - lo + 1);
  for (Index k = 0; k < out.size(); ++k) out[k] = row_(lo + k);
  return out;
}

ProductMeasureGrid::ProductMeasureGrid(double alpha, Index copies, double h, double half_width,
                                       const RandomStream& stream)
    : alpha_(alpha), copies_(copies), h_(h), half_width_(half_width), key_(stream.key()) {
  check_grid(alpha, h, half_width);
  if (copies < 1) throw ParameterError("stable-measure", "product grid needs at least one copy");
  scale_ = std::pow(h / static_cast<double>(copies), 1.0 / alpha);
}

CellRow ProductMeasureGrid::row(Index copy) const {
  if (copy < 0 || copy >= copies_) throw RangeError("stable-measure", "copy index out of range");
  return CellRow(alpha_, scale_, key_, static_cast<std::uint64_t>(copy) + 1);
}

RowPrefix ProductMeasureGrid::prefix(Index copy) const { return RowPrefix(row(copy), h_); }

// ---------------------------------------------------------------------------

Integrand Integrand::indicator(double a, double b, double weight) {
  Integrand out;
  if (a > b) std::swap(a, b);
  if (a < b && weight != 0.0) out.pieces_.push_back({Kind::indicator, a, b, weight, {}, {}, {}});
  return out;
}

Integrand Integrand::piecewise_linear(Vector x, Vector y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("stable-measure", "piecewise-linear needs >= 2 knots");
  for (Index k = 1; k < x.size(); ++k)
    if (!(x[k] > x[k - 1])) throw ParameterError("stable-measure", "knots must increase");
  Integrand out;
  const double a = x[0];
  const double b = x[x.size() - 1];
  out.pieces_.push_back({Kind::linear, a, b, 1.0, std::move(x), std::move(y), {}});
  return out;
}

Integrand Integrand::function(std::function<double(double)> f, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("stable-measure", "function integrand needs a finite support");
  }
  Integrand out;
  out.pieces_.push_back({Kind::function, lo, hi, 1.0, {}, {}, std::move(f)});
  return out;
}

Integrand& Integrand::operator+=(const Integrand& other) {
  pieces_.insert(pieces_.end(), other.pieces_.begin(), other.pieces_.end());
  return *this;
}

Integrand Integrand::scaled(double c) const {
  Integrand out = *this;
  for (auto& p : out.pieces_) p.weight *= c;
  return out;
}

double Integrand::operator()(double x) const {
  double v = 0.0;
  for (const auto& p : pieces_) {
    if (x < p.a || x > p.b) continue;
    switch (p.kind) {
      case Kind::indicator:
        v += p.weight;
        break;
      case Kind::linear: {
        const Index n = p.xs.size();
        const auto it = std::upper_bound(p.xs.data(), p.xs.data() + n, x);
        const Index k = std::clamp<Index>(static_cast<Index>(it - p.xs.data()) - 1, 0, n - 2);
        const double s = (x - p.xs[k]) / (p.xs[k + 1] - p.xs[k]);
        v += p.weight * (p.ys[k] + s * (p.ys[k + 1] - p.ys[k]));
        break;
      }
      case Kind::function:
        v += p.weight * p.f(x);
        break;
    }
  }
  return v;
}

double Integrand::cell_integral(double x0, double x1) const {
  double total = 0.0;
  for (const auto& p : pieces_) {
    const double u = std::max(x0, p.a);
    const double v = std::min(x1, p.b);
    if (!(v > u)) continue;
    switch (p.kind) {
      case Kind::indicator:
        total += p.weight * (v - u);
        break;
      case Kind::linear: {
        const Index n = p.xs.size();
        for (Index k = 0; k + 1 < n; ++k) {
          const double lo = std::max(u, p.xs[k]);
          const double hi = std::min(v, p.xs[k + 1]);
          if (!(hi > lo)) continue;
          const double slope = (p.ys[k + 1] - p.ys[k]) / (p.xs[k + 1] - p.xs[k]);
          const double ylo = p.ys[k] + slope * (lo - p.xs[k]);
          const double yhi = p.ys[k] + slope * (hi - p.xs[k]);
          total += p.weight * 0.5 * (ylo + yhi) * (hi - lo);
        }
        break;
      }
      case Kind::function:
        total += p.weight * p.f(0.5 * (u + v)) * (v - u);
        break;
    }
  }
  return total;
}

double Integrand::support_lo() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) lo = std::min(lo, p.a);
  return lo;
}

double Integrand::support_hi() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) hi = std::max(hi, p.b);
  return hi;
}

double Integrand::discrete_norm_pow(double alpha, double h, double lo, double hi) const {
  if (empty()) return 0.0;
  lo = std::max(lo, support_lo());
  hi = std::min(hi, support_hi());
  if (!(hi > lo)) return 0.0;
  const auto j0 = static_cast<std::int64_t>(std::floor(lo / h));
  const auto j1 = static_cast<std::int64_t>(std::ceil(hi / h));
  double mass = 0.0;
  for (std::int64_t j = j0; j < j1; ++j) {
    const double avg = cell_integral(static_cast<double>(j) * h, static_cast<double>(j + 1) * h) / h;
    mass += std::pow(std::abs(avg), alpha) * h;
  }
  return mass;
}

// ---------------------------------------------------------------------------

namespace {

// Cells of the grid domain that meet the support of f.
std::pair<std::int64_t, std::int64_t> support_cells(const Integrand& f, double h, std::int64_t first,
                                                    std::int64_t last) {
  const auto j0 = std::max(first, static_cast<std::int64_t>(std::floor(f.support_lo() / h)));
  const auto j1 = std::min(last, static_cast<std::int64_t>(std::ceil(f.support_hi() / h)) - 1);
  return {j0, j1};
}

void check_truncation(const Integrand& f, double alpha, double h, double half_width) {
  const double inf = std::numeric_limits<double>::infinity();
  const double lo_edge = std::floor(-half_width / h) * h;
  const double hi_edge = std::ceil(half_width / h) * h;
  const double outside = f.discrete_norm_pow(alpha, h, -inf, lo_edge) + f.discrete_norm_pow(alpha, h, hi_edge, inf);
  if (outside == 0.0) return;
  const double total = f.discrete_norm_pow(alpha, h, -inf, inf);
  if (outside > 1e-3 * total) {
    throw TruncationError("stable-measure", "integrand mass outside [-L, L] is " + std::to_string(outside / total) +
                                                " of the total (budget 1e-3)");
  }
}

double row_integral(const Integrand& f, const CellRow& row, double h, std::int64_t first, std::int64_t last) {
  const auto [j0, j1] = support_cells(f, h, first, last);
  double out = 0.0;
  for (std::int64_t j = j0; j <= j1; ++j) {
    const double c = f.cell_integral(static_cast<double>(j) * h, static_cast<double>(j + 1) * h);
    if (c != 0.0) out += c / h * row(j);
  }
  return out;
}

}  // namespace

double stable_integral(const Integrand& f, const MeasureGrid1D& grid) {
  if (f.empty()) return 0.0;
  check_truncation(f, grid.alpha(), grid.cell_width(), grid.half_width());
  return row_integral(f, grid.row(), grid.cell_width(), grid.first_cell(), grid.last_cell());
}

double product_integral(const std::vector<Integrand>& kernels, const ProductMeasureGrid& grid) {
  if (static_cast<Index>(kernels.size()) != grid.copies()) {
    throw ParameterError("stable-measure", "one kernel per copy is required");
  }
  const double h = grid.cell_width();
  const auto first = static_cast<std::int64_t>(std::floor(-grid.half_width() / h));
  const auto last = static_cast<std::int64_t>(std::ceil(grid.half_width() / h)) - 1;
  double out = 0.0;
  for (Index i = 0; i < grid.copies(); ++i) {
    const Integrand& k = kernels[static_cast<std::size_t>(i)];
    if (k.empty()) continue;
    check_truncation(k, grid.alpha(), h, grid.half_width());
    out += row_integral(k, grid.row(i), h, first, last);
  }
  return out;
}

// ---------------------------------------------------------------------------

ScenerySignedMeasure::ScenerySignedMeasure(SceneryField scenery, double h) : scenery_(std::move(scenery)), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("stable-measure", "cell width must be positive");
}

double ScenerySignedMeasure::operator()(const Integrand& f) const {
  if (f.empty()) return 0.0;
  const double lo = f.support_lo();
  const double hi = f.support_hi();
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw NumericError("stable-measure", "integrand support not finite");
  const double density = std::pow(h_, -1.0 + 1.0 / scenery_.alpha());
  // cell k is (hk, h(k+1)]
  const auto k0 = static_cast<std::int64_t>(std::ceil(lo / h_)) - 1;
  const auto k1 = static_cast<std::int64_t>(std::ceil(hi / h_)) - 1;
  double out = 0.0;
  for (std::int64_t k = k0; k <= k1; ++k) {
    const double c = f.cell_integral(static_cast<double>(k) * h_, static_cast<double>(k + 1) * h_);
    if (!std::isfinite(c)) throw NumericError("stable-measure", "non-finite cell integral at cell " + std::to_string(k));
    if (c != 0.0) out += scenery_(k) * density * c;
  }
  return out;
}

double mu_h_functional(const ScenerySignedMeasure& mu, const Integrand& f) { return mu(f); }

DiagonalReport verify_diagonal_convergence(const std::vector<Integrand>& fn, const Integrand& f, double alpha,
                                           const Vector& hn, Index replicates, const Vector& theta,
                                           SceneryKind kind, RandomStream& stream, double reference_h) {
  if (static_cast<Index>(fn.size()) != hn.size()) throw ParameterError("stable-measure", "f_n and h_n differ in length");
  if (replicates < 2) throw ParameterError("stable-measure", "need at least two replicates");
  if (reference_h <= 0.0) reference_h = hn.size() > 0 ? hn.minCoeff() : 1.0 / 256.0;
  const double half_width =
      f.empty() ? 1.0 : std::max(std::abs(f.support_lo()), std::abs(f.support_hi())) + 2.0 * reference_h;

  Vector ref(replicates);
  for (Index r = 0; r < replicates; ++r) {
    const MeasureGrid1D grid(alpha, reference_h, half_width, stream.child("reference", static_cast<std::uint64_t>(r)));
    ref[r] = stable_integral(f, grid);
  }
  DiagonalReport out{hn, Vector(hn.size()), ecf(ref, theta), {}, true};
  for (Index n = 0; n < hn.size(); ++n) {
    Vector samples(replicates);
    for (Index r = 0; r < replicates; ++r) {
      // same scenery for every n (common random numbers)
      const SceneryField eta(kind, alpha, Site::edge, stream.child("scenery", static_cast<std::uint64_t>(r)));
      samples[r] = ScenerySignedMeasure(eta, hn[n])(fn[static_cast<std::size_t>(n)]);
    }
    out.approximations.push_back(ecf(samples, theta));
    out.distance[n] = ecf_distance(out.approximations.back(), out.reference);
    if (n > 0 && out.distance[n] > out.distance[n - 1]) out.decreasing = false;
  }
  return out;
}

}  // namespace rwrt
