#include "rwrt/stats.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace rwrt {

namespace {

double median_abs(const Eigen::Ref<const Vector>& column) {
  std::vector<double> v(static_cast<std::size_t>(column.size()));
  for (Index i = 0; i < column.size(); ++i) v[static_cast<std::size_t>(i)] = std::abs(column[i]);
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (n % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double regression_slope(const Vector& x, const Vector& y) {
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  return ((x.array() - mx) * (y.array() - my)).sum() / sxx;
}

double slope_for_rows(const Matrix& ensemble, const Vector& log_t, std::span<const Index> columns,
                      const std::vector<Index>& rows) {
  Vector log_med(static_cast<Index>(columns.size()));
  Vector col(static_cast<Index>(rows.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[static_cast<Index>(r)] = ensemble(rows[r], columns[c]);
    const double med = median_abs(col);
    if (!(med > 0.0) || !std::isfinite(med)) {
      throw EstimationError("stats-verify", "degenerate ensemble: median |X_t| is zero or not finite");
    }
    log_med[static_cast<Index>(c)] = std::log(med);
  }
  return regression_slope(log_t, log_med);
}

}  // namespace

double normal_cdf(double x, double variance) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance)); }

HurstReport estimate_hurst(const Matrix& ensemble, const Vector& times, std::span<const Index> columns) {
  const Index paths = ensemble.rows();
  if (paths < 100) throw ParameterError("stats-verify", "Hurst estimation needs at least 100 paths");
  if (columns.size() < 4) throw ParameterError("stats-verify", "Hurst estimation needs at least 4 scales");
  Vector log_t(static_cast<Index>(columns.size()));
  Vector scales(static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double t = times[columns[c]];
    if (!(t > 0.0)) throw ParameterError("stats-verify", "Hurst scales must be positive times");
    scales[static_cast<Index>(c)] = t;
    log_t[static_cast<Index>(c)] = std::log(t);
  }

  std::vector<Index> all(static_cast<std::size_t>(paths));
  std::iota(all.begin(), all.end(), Index{0});
  const double estimate = slope_for_rows(ensemble, log_t, columns, all);

  // Delete-a-group jackknife over 10 contiguous groups.
  constexpr Index kGroups = 10;
  Vector partial(kGroups);
  for (Index g = 0; g < kGroups; ++g) {
    const Index lo = g * paths / kGroups;
    const Index hi = (g + 1) * paths / kGroups;
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(paths - (hi - lo)));
    for (Index r = 0; r < paths; ++r)
      if (r < lo || r >= hi) rows.push_back(r);
    partial[g] = slope_for_rows(ensemble, log_t, columns, rows);
  }
  const double var = static_cast<double>(kGroups - 1) / kGroups * (partial.array() - partial.mean()).square().sum();
  const double stderr_ = std::max(std::sqrt(var), 1e-12);
  return {estimate, stderr_, "median-abs log-log regression", scales};
}

HurstReport estimate_hurst(const Matrix& ensemble, const TimeGrid& grid, Index min_step) {
  if (ensemble.cols() != grid.points()) throw ParameterError("stats-verify", "ensemble does not match grid");
  std::vector<Index> columns;
  for (Index step = grid.steps; step >= std::max<Index>(min_step, 1); step /= 2) {
    columns.push_back(step);
    if (step % 2 != 0) break;
  }
  std::reverse(columns.begin(), columns.end());
  return estimate_hurst(ensemble, grid.times(), columns);
}

// ---------------------------------------------------------------------------

Vector theta_grid(double lo, double hi, Index count) {
  if (count < 1) throw ParameterError("stats-verify", "theta grid needs points");
  if (count == 1) return Vector::Constant(1, lo);
  return Vector::LinSpaced(count, lo, hi);
}

EcfReport ecf_from_conditional(const Matrix& conditional, const Vector& theta) {
  if (conditional.cols() != theta.size()) throw ParameterError("stats-verify", "conditional cf shape mismatch");
  const Index n = conditional.rows();
  if (n < 2) throw ParameterError("stats-verify", "need at least two samples");
  EcfReport out{theta, Vector(theta.size()), Vector(theta.size())};
  for (Index k = 0; k < theta.size(); ++k) {
    const auto est = mean_with_stderr(conditional.col(k));
    out.value[k] = est.mean;
    out.stderr_[k] = est.stderr_;
  }
  return out;
}

double ecf_distance(const EcfReport& a, const EcfReport& b) {
  if (a.theta.size() != b.theta.size() || (a.theta - b.theta).cwiseAbs().maxCoeff() > 0.0) {
    throw ParameterError("stats-verify", "ecf reports use different theta grids");
  }
  return (a.value - b.value).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double effective_n) {
  const double en = std::sqrt(effective_n);
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
}

std::vector<double> sorted_copy(const Vector& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

KsResult ks_two_sample(const Vector& a, const Vector& b) {
  if (a.size() < 1 || b.size() < 1) throw ParameterError("stats-verify", "KS test needs samples");
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  return {d, ks_p_value(d, n1 * n2 / (n1 + n2)), a.size(), b.size()};
}

KsResult ks_one_sample(const Vector& a, const std::function<double(double)>& cdf) {
  if (a.size() < 1) throw ParameterError("stats-verify", "KS test needs samples");
  const auto x = sorted_copy(a);
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n), a.size(), 0};
}

// ---------------------------------------------------------------------------

CovarianceReport cov_matrix(const Matrix& ensemble, std::span<const Index> columns) {
  const Index n = ensemble.rows();
  if (n < 3) throw ParameterError("stats-verify", "covariance needs at least three replicates");
  const auto k = static_cast<Index>(columns.size());
  Matrix centred(n, k);
  for (Index c = 0; c < k; ++c) {
    const auto col = ensemble.col(columns[static_cast<std::size_t>(c)]);
    centred.col(c) = col.array() - col.mean();
  }
  CovarianceReport out{Matrix(k, k), Matrix(k, k)};
  const double nd = static_cast<double>(n);
  for (Index a = 0; a < k; ++a) {
    for (Index b = a; b < k; ++b) {
      const auto x = centred.col(a).array();
      const auto y = centred.col(b).array();
      const double sx = x.sum();
      const double sy = y.sum();
      const double sxy = (x * y).sum();
      const double cov = (sxy - sx * sy / nd) / (nd - 1.0);
      // Delete-one values in closed form.
      const Eigen::ArrayXd loo =
          ((sxy - x * y) - (sx - x) * (sy - y) / (nd - 1.0)) / (nd - 2.0);
      const double var = (nd - 1.0) / nd * (loo - loo.mean()).square().sum();
      out.cov(a, b) = out.cov(b, a) = cov;
      out.stderr_(a, b) = out.stderr_(b, a) = std::sqrt(var);
    }
  }
  return out;
}

CovarianceReport cov_matrix(const Matrix& ensemble) {
  std::vector<Index> columns(static_cast<std::size_t>(ensemble.cols()));
  std::iota(columns.begin(), columns.end(), Index{0});
  return cov_matrix(ensemble, columns);
}

}  // namespace rwrt
