#pragma once

#include "rwrt/core.hpp"
#include "rwrt/random.hpp"
#include "rwrt/scenery.hpp"
#include "rwrt/stats.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace rwrt {

/// One row of lazily generated cell draws: draw(j) = scale * SaS(alpha) from
/// Philox counter (j, row).  Cell j is [j h, (j+1) h).
class CellRow {
 public:
  CellRow(double alpha, double scale, std::uint64_t key, std::uint64_t row)
      : alpha_(alpha), scale_(scale), key_(key), row_(row) {}

  double operator()(std::int64_t j) const {
    const auto w = philox_u64x2(key_, static_cast<std::uint64_t>(j), row_);
    return scale_ * sas_from_uniforms(alpha_, open_unit(w[0]), open_unit(w[1]));
  }

 private:
  double alpha_;
  double scale_;
  std::uint64_t key_;
  std::uint64_t row_;
};

/// Partial sums of a cell sequence, extended outward from cell 0 on demand.
/// Summation order is fixed (away from the origin) so results do not depend
/// on the query order.
class RowPrefix {
 public:
  RowPrefix(std::function<double(std::int64_t)> cell, double h) : cell_(std::move(cell)), h_(h) {
    pos_.push_back(0.0);
    neg_.push_back(0.0);
  }

  /// P(j): sum of cells 0..j-1 for j >= 0, minus the sum of cells j..-1 for j < 0.
  double prefix(std::int64_t j);
  /// Integral of 1_[a, b] (either order) with fractional coverage of the end cells.
  double indicator(double a, double b);
  double cell(std::int64_t j) const { return cell_(j); }
  double width() const { return h_; }

 private:
  std::function<double(std::int64_t)> cell_;
  double h_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

/// M0 on R: independent SaS(h^{1/alpha}) draws per cell, domain [-L, L].
class MeasureGrid1D {
 public:
  MeasureGrid1D(double alpha, double h, double half_width, const RandomStream& stream);

  double alpha() const { return alpha_; }
  double cell_width() const { return h_; }
  double half_width() const { return half_width_; }
  std::int64_t first_cell() const;
  std::int64_t last_cell() const;

  double draw(std::int64_t j) const { return row_(j); }
  const CellRow& row() const { return row_; }
  RowPrefix prefix() const;
  Vector draws() const;  // whole domain, first_cell() .. last_cell()

 private:
  double alpha_;
  double h_;
  double half_width_;
  CellRow row_;
};

/// M1 on Omega' x R with Omega' replaced by M equally weighted copies:
/// SaS((h/M)^{1/alpha}) per (copy, cell).
class ProductMeasureGrid {
 public:
  ProductMeasureGrid(double alpha, Index copies, double h, double half_width, const RandomStream& stream);

  double alpha() const { return alpha_; }
  Index copies() const { return copies_; }
  double cell_width() const { return h_; }
  double half_width() const { return half_width_; }

  double draw(Index copy, std::int64_t j) const { return row(copy)(j); }
  CellRow row(Index copy) const;
  RowPrefix prefix(Index copy) const;

 private:
  double alpha_;
  Index copies_;
  double h_;
  double half_width_;
  double scale_;
  std::uint64_t key_;
};

/// Real integrand as a sum of pieces: weighted indicators and piecewise-linear
/// pieces are integrated exactly over cells, general functions by the
/// midpoint rule.
class Integrand {
 public:
  Integrand() = default;

  static Integrand indicator(double a, double b, double weight = 1.0);
  static Integrand piecewise_linear(Vector x, Vector y);
  static Integrand function(std::function<double(double)> f, double lo, double hi);

  Integrand& operator+=(const Integrand& other);
  friend Integrand operator+(Integrand a, const Integrand& b) { return a += b; }
  Integrand scaled(double c) const;

  bool empty() const { return pieces_.empty(); }
  double operator()(double x) const;
  double cell_integral(double x0, double x1) const;
  double support_lo() const;
  double support_hi() const;

  /// sum_j |cell average|^alpha h over cells of width h meeting the support,
  /// restricted to [lo, hi].
  double discrete_norm_pow(double alpha, double h, double lo, double hi) const;

 private:
  enum class Kind { indicator, linear, function };
  struct Piece {
    Kind kind;
    double a;
    double b;
    double weight;
    Vector xs;
    Vector ys;
    std::function<double(double)> f;
  };
  std::vector<Piece> pieces_;
};

/// sum_j (cell integral / h) * draw_j.  TruncationError when more than 1e-3
/// of the discrete L^alpha mass lies outside the grid domain.
double stable_integral(const Integrand& f, const MeasureGrid1D& grid);

/// sum_i sum_j (cell integral of kernel_i / h) * draw(i, j).  kernels.size()
/// must equal the number of copies.
double product_integral(const std::vector<Integrand>& kernels, const ProductMeasureGrid& grid);

/// mu_h: density h^{-1+1/alpha} eta(k) on (hk, h(k+1)].
class ScenerySignedMeasure {
 public:
  ScenerySignedMeasure(SceneryField scenery, double h);

  double operator()(const Integrand& f) const;
  double cell_width() const { return h_; }
  const SceneryField& scenery() const { return scenery_; }

 private:
  SceneryField scenery_;
  double h_;
};

double mu_h_functional(const ScenerySignedMeasure& mu, const Integrand& f);

struct DiagonalReport {
  Vector h;
  Vector distance;
  EcfReport reference;
  std::vector<EcfReport> approximations;
  bool decreasing = false;
};

/// Ecf of mu_{h_n}[f_n] (fresh scenery per replicate, common across n)
/// against the ecf of stable_integral(f) on a grid of width reference_h
/// (0 = smallest h_n).
DiagonalReport verify_diagonal_convergence(const std::vector<Integrand>& fn, const Integrand& f, double alpha,
                                           const Vector& hn, Index replicates, const Vector& theta,
                                           SceneryKind kind, RandomStream& stream, double reference_h = 0.0);

}  // namespace rwrt
