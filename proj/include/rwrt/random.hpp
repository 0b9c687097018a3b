#pragma once

#include "rwrt/core.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rwrt {

// ---------------------------------------------------------------------------
// Counter-based bit generation
// ---------------------------------------------------------------------------

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3").  Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two 64-bit words for counter (c0, c1) under a 64-bit key.
std::array<std::uint64_t, 2> philox_u64x2(std::uint64_t key, std::uint64_t c0, std::uint64_t c1);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Maps 64 random bits to the open interval (0, 1).
inline double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Reproducible stream identified by a master seed and a lineage of
/// (tag, replicate-index) pairs.  Children derived with distinct lineages use
/// distinct Philox keys and are therefore independent.
class RandomStream {
 public:
  using Lineage = std::vector<std::pair<std::string, std::uint64_t>>;

  explicit RandomStream(std::uint64_t master_seed);

  RandomStream child(std::string_view tag, std::uint64_t index = 0) const;

  std::uint64_t master_seed() const { return master_seed_; }
  const Lineage& lineage() const { return lineage_; }
  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  double uniform() { return open_unit(next_u64()); }
  double normal();
  double exponential() { return -std::log(uniform()); }

 private:
  std::uint64_t master_seed_;
  Lineage lineage_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::optional<double> spare_normal_;
};

// ---------------------------------------------------------------------------
// Symmetric alpha-stable laws.  Convention: characteristic function
// exp(-sigma^alpha |theta|^alpha).  With alpha = 2 this is N(0, 2 sigma^2),
// i.e. sigma = 1 means variance 2.
// ---------------------------------------------------------------------------

struct StableParams {
  double alpha = 2.0;
  double sigma = 1.0;

  void validate() const;
};

/// Chambers-Mallows-Stuck transform of two (0,1) uniforms into a standard
/// (sigma = 1) SaS variate.
double sas_from_uniforms(double alpha, double u_angle, double u_exp);

double sample_sas(const StableParams& params, RandomStream& stream);
Vector sample_sas(const StableParams& params, Index n, RandomStream& stream);

/// Laws available for sceneries.  All are symmetric and normalised to the
/// sigma = 1 SaS limit (gaussian: N(0,2); rademacher: +-sqrt(2)).
enum class SceneryKind { exact_stable, gaussian, rademacher };

inline constexpr double kRademacherMagnitude = 1.4142135623730951;

void validate_scenery_law(SceneryKind kind, double alpha);

/// One scenery draw from two random words; shared by the sequential sampler
/// and the lazily indexed SceneryField.
double scenery_from_bits(SceneryKind kind, double alpha, std::uint64_t w0, std::uint64_t w1);

Vector sample_scenery_law(SceneryKind kind, double alpha, Index n, RandomStream& stream);

std::string to_string(SceneryKind kind);
SceneryKind scenery_kind_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Fractional Gaussian noise and fractional Brownian motion
// ---------------------------------------------------------------------------

/// Autocovariance of unit fGn: 0.5(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
template <typename Scalar>
Scalar fgn_autocovariance(Scalar hurst, Index lag) {
  using std::abs;
  using std::pow;
  const Scalar k = abs(static_cast<Scalar>(lag));
  const Scalar two_h = Scalar(2) * hurst;
  return Scalar(0.5) * (pow(k + Scalar(1), two_h) - Scalar(2) * pow(k, two_h) + pow(abs(k - Scalar(1)), two_h));
}

/// fGn sampler for a fixed (H, n).  Circulant embedding (Davies-Harte) with a
/// dense Cholesky fallback when the embedding has a negative eigenvalue below
/// -1e-10.  H = 1/2 is white noise and is sampled directly.
class FgnGenerator {
 public:
  static constexpr Index kDenseLimit = 4096;

  FgnGenerator(double hurst, Index n, bool force_dense = false);

  Vector sample(RandomStream& stream) const;

  double hurst() const { return hurst_; }
  Index size() const { return n_; }
  bool uses_circulant() const { return method_ == Method::circulant; }
  bool uses_dense() const { return method_ == Method::dense; }

 private:
  enum class Method { white, circulant, dense };
  double hurst_;
  Index n_;
  Method method_;
  Vector sqrt_eigenvalues_;  // circulant: sqrt(lambda_k / m)
  Matrix cholesky_;          // dense: lower factor
};

Vector gen_fgn(double hurst, Index n, RandomStream& stream);

/// fBm with Var(Y_1) = 1 on a uniform grid starting at 0.
RealPath gen_fbm_path(double hurst, const TimeGrid& grid, RandomStream& stream);

/// Exact fBm at arbitrary increasing positive times.  Factorises the
/// correlation of the Lamperti-stationary process t^{-H} Y_t, which stays
/// well conditioned on logarithmic grids spanning many decades.
class FbmSampler {
 public:
  FbmSampler(double hurst, Vector times);

  const Vector& times() const { return times_; }
  double hurst() const { return hurst_; }

  /// Full sample.  When stop_at is given, generation stops at the first node
  /// whose value is >= *stop_at and the returned vector ends there.
  Vector sample(RandomStream& stream, std::optional<double> stop_at = std::nullopt) const;

 private:
  double hurst_;
  Vector times_;
  Vector scale_;  // t^H
  Matrix factor_;
  bool triangular_ = true;
};

/// exp(u) for u on a uniform grid in [log t_min, log t_max].
Vector log_time_grid(double t_min, double t_max, double log_step);

}  // namespace rwrt
