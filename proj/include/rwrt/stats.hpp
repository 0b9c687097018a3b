#pragma once

#include "rwrt/core.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>

namespace rwrt {

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean with its standard error.
template <typename Derived>
MeanEstimate mean_with_stderr(const Eigen::DenseBase<Derived>& samples) {
  const Index n = samples.size();
  if (n < 2) throw ParameterError("stats-verify", "need at least two samples");
  const double mean = samples.derived().template cast<double>().mean();
  const double ss = (samples.derived().template cast<double>().array() - mean).square().sum();
  return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

double normal_cdf(double x, double variance = 1.0);

// ---------------------------------------------------------------------------
// Hurst exponent
// ---------------------------------------------------------------------------

struct HurstReport {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::string method;
  Vector scales;
};

/// Log-log regression of the ensemble median of |X_t| against t.
/// `ensemble` holds one path per row; `times` labels the selected columns.
HurstReport estimate_hurst(const Matrix& ensemble, const Vector& times, std::span<const Index> columns);

/// Dyadic scales t = T / 2^j down to min_step grid steps.
HurstReport estimate_hurst(const Matrix& ensemble, const TimeGrid& grid, Index min_step = 1);

// ---------------------------------------------------------------------------
// Empirical characteristic functions (real part; laws here are symmetric)
// ---------------------------------------------------------------------------

struct EcfReport {
  Vector theta;
  Vector value;
  Vector stderr_;
};

Vector theta_grid(double lo, double hi, Index count);

template <typename Derived>
EcfReport ecf(const Eigen::DenseBase<Derived>& samples, const Vector& theta) {
  const Index n = samples.size();
  if (n < 1) throw ParameterError("stats-verify", "ecf needs samples");
  EcfReport out{theta, Vector(theta.size()), Vector(theta.size())};
  for (Index k = 0; k < theta.size(); ++k) {
    const auto c = (theta[k] * samples.derived().template cast<double>().array()).cos();
    const double m = c.mean();
    const double var = n > 1 ? (c - m).square().sum() / static_cast<double>(n - 1) : 0.0;
    out.value[k] = m;
    out.stderr_[k] = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

/// Ecf from per-sample conditional characteristic functions
/// E[cos(theta X) | nuisance], one row per sample, one column per theta.
EcfReport ecf_from_conditional(const Matrix& conditional, const Vector& theta);

/// Sup distance over a common theta grid.
double ecf_distance(const EcfReport& a, const EcfReport& b);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Index n1 = 0;
  Index n2 = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(const Vector& a, const Vector& b);
KsResult ks_one_sample(const Vector& a, const std::function<double(double)>& cdf);

// ---------------------------------------------------------------------------
// Covariance with jackknife errors
// ---------------------------------------------------------------------------

struct CovarianceReport {
  Matrix cov;
  Matrix stderr_;
};

/// Sample covariance of the selected columns (rows = replicates) with
/// delete-one jackknife standard errors.
CovarianceReport cov_matrix(const Matrix& ensemble, std::span<const Index> columns);
CovarianceReport cov_matrix(const Matrix& ensemble);

}  // namespace rwrt
