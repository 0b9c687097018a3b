#pragma once

#include "rwrt/core.hpp"
#include "rwrt/random.hpp"
#include "rwrt/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rwrt {

/// First crossing of level s > 0 by the linear interpolant; nullopt if the
/// path stays below s up to its horizon.
std::optional<double> hitting_time(const RealPath& y, double s);

/// Same for a path sampled at increasing positive times, with Y_0 = 0
/// implied before the first sample.
std::optional<double> hitting_time(const Vector& times, const Vector& values, double s);

struct HittingTimeMap {
  Vector levels;
  std::vector<std::optional<double>> taus;
  Vector overshoot;  // Y at the first node past tau_s, minus s (one-step oscillation)

  static HittingTimeMap build(const Vector& times, const Vector& values, const Vector& levels);
  static HittingTimeMap build(const RealPath& y, const Vector& levels);
  bool all_reached() const;
};

/// Extraction runs sample fBm exactly on a logarithmic time grid
/// [t_min, t_max] with spacing log_step in log t.
struct ExtractSpec {
  double hurst = 0.75;
  Vector levels;
  Index replicates = 10000;
  Index copies = 16;  // times-extraction only
  double cell_width = 1.0 / 256.0;
  double t_min = 1e-4;
  double t_max = 1e14;
  double log_step = 0.1;

  void validate() const;
};

struct ExtractReport {
  std::string mode;
  Vector levels;
  Matrix samples;  // kept replicates x levels
  Index replicates = 0;
  Index dropped = 0;
  double drop_rate = 0.0;
  double convention_factor = 2.0;  // Var M([0, s]) = 2 s for alpha = 2, sigma = 1
  double median_overshoot = 0.0;  // diagnostic only; Y(tau_s) = s on the interpolant
  CovarianceReport cov;
  Matrix target_cov;  // convention_factor * min(s, t)
  // times-extraction: E(X_s + X_t)^2 for the first two levels, target factor (3s + t)
  double pair_second_moment = 0.0;
  double pair_second_moment_stderr = 0.0;
  double pair_second_moment_target = 0.0;
};

/// Y^(-) at tau_s: indicator integral of 1_[0, Y_{tau_s}] against M0 (alpha = 2).
ExtractReport extract_bm_minus(const ExtractSpec& spec, const RandomStream& stream);

/// M copies, each time-changed by its own tau^(i), integrated against M1.
ExtractReport extract_bm_times(const ExtractSpec& spec, const RandomStream& stream);

}  // namespace rwrt
