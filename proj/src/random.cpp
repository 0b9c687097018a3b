#include "rwrt/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>

namespace rwrt {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::array<std::uint64_t, 2> philox_u64x2(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
  const auto out = philox4x32({static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
                               static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c1 >> 32)},
                              {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
  return {static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32),
          static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32)};
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------

RandomStream::RandomStream(std::uint64_t master_seed) : master_seed_(master_seed), key_(mix64(master_seed)) {}

RandomStream RandomStream::child(std::string_view tag, std::uint64_t index) const {
  RandomStream out(master_seed_);
  out.lineage_ = lineage_;
  out.lineage_.emplace_back(std::string(tag), index);
  out.key_ = mix64(mix64(key_ ^ fnv1a(tag)) ^ mix64(index + 0x632be59bd9b4e019ull));
  return out;
}

std::uint64_t RandomStream::next_u64() {
  if (buffered_ == 0) {
    buffer_ = philox_u64x2(key_, counter_++, 0);
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double RandomStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = r * std::sin(angle);
  return r * std::cos(angle);
}

// ---------------------------------------------------------------------------

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("rng-sampling", "alpha must lie in (0, 2]");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("rng-sampling", "sigma must be positive");
}

double sas_from_uniforms(double alpha, double u_angle, double u_exp) {
  const double v = std::numbers::pi * (u_angle - 0.5);
  const double w = -std::log(u_exp);
  if (alpha == 2.0) return 2.0 * std::sin(v) * std::sqrt(w);
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

double sample_sas(const StableParams& params, RandomStream& stream) {
  params.validate();
  const double u0 = stream.uniform();
  const double u1 = stream.uniform();
  return params.sigma * sas_from_uniforms(params.alpha, u0, u1);
}

Vector sample_sas(const StableParams& params, Index n, RandomStream& stream) {
  params.validate();
  if (n < 1) throw ParameterError("rng-sampling", "sample count must be positive");
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = sample_sas(params, stream);
  return out;
}

void validate_scenery_law(SceneryKind kind, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("rng-sampling", "alpha must lie in (0, 2]");
  if (kind != SceneryKind::exact_stable && alpha != 2.0) {
    throw ParameterError("rng-sampling", to_string(kind) + " scenery requires alpha = 2");
  }
}

double scenery_from_bits(SceneryKind kind, double alpha, std::uint64_t w0, std::uint64_t w1) {
  switch (kind) {
    case SceneryKind::exact_stable:
      return sas_from_uniforms(alpha, open_unit(w0), open_unit(w1));
    case SceneryKind::gaussian:
      return sas_from_uniforms(2.0, open_unit(w0), open_unit(w1));
    case SceneryKind::rademacher:
      return (w0 >> 63) ? kRademacherMagnitude : -kRademacherMagnitude;
  }
  return 0.0;
}

Vector sample_scenery_law(SceneryKind kind, double alpha, Index n, RandomStream& stream) {
  validate_scenery_law(kind, alpha);
  if (n < 1) throw ParameterError("rng-sampling", "sample count must be positive");
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t w0 = stream.next_u64();
    const std::uint64_t w1 = stream.next_u64();
    out[i] = scenery_from_bits(kind, alpha, w0, w1);
  }
  return out;
}

std::string to_string(SceneryKind kind) {
  switch (kind) {
    case SceneryKind::exact_stable:
      return "exact-stable";
    case SceneryKind::gaussian:
      return "gaussian";
    case SceneryKind::rademacher:
      return "rademacher";
  }
  return "?";
}

SceneryKind scenery_kind_from_string(std::string_view name) {
  if (name == "exact-stable" || name == "stable") return SceneryKind::exact_stable;
  if (name == "gaussian") return SceneryKind::gaussian;
  if (name == "rademacher") return SceneryKind::rademacher;
  throw ParameterError("rng-sampling", "unknown scenery kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

FgnGenerator::FgnGenerator(double hurst, Index n, bool force_dense) : hurst_(hurst), n_(n) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("rng-sampling", "Hurst index must lie in (0, 1)");
  if (n < 1) throw ParameterError("rng-sampling", "fGn length must be positive");

  if (hurst == 0.5 && !force_dense) {
    method_ = Method::white;
    return;
  }

  bool embedding_ok = !force_dense;
  if (embedding_ok) {
    const Index m = 2 * n;
    std::vector<std::complex<double>> row(static_cast<std::size_t>(m));
    for (Index k = 0; k <= n; ++k) row[static_cast<std::size_t>(k)] = fgn_autocovariance(hurst, k);
    for (Index k = n + 1; k < m; ++k) row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(m - k)];
    std::vector<std::complex<double>> spectrum;
    Eigen::FFT<double> fft;
    fft.fwd(spectrum, row);
    sqrt_eigenvalues_.resize(m);
    for (Index k = 0; k < m; ++k) {
      double lambda = spectrum[static_cast<std::size_t>(k)].real();
      if (lambda < 0.0) {
        if (lambda < -1e-10) {
          embedding_ok = false;
          break;
        }
        lambda = 0.0;
      }
      sqrt_eigenvalues_[k] = std::sqrt(lambda / static_cast<double>(m));
    }
  }
  if (embedding_ok) {
    method_ = Method::circulant;
    return;
  }

  if (n > kDenseLimit) {
    throw ResourceError("rng-sampling", "circulant embedding failed and n = " + std::to_string(n) +
                                            " exceeds the dense fallback limit");
  }
  method_ = Method::dense;
  sqrt_eigenvalues_.resize(0);
  Matrix cov(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) cov(i, j) = fgn_autocovariance(hurst, i - j);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericError("rng-sampling", "fGn covariance is not positive definite");
  cholesky_ = llt.matrixL();
}

Vector FgnGenerator::sample(RandomStream& stream) const {
  Vector out(n_);
  switch (method_) {
    case Method::white:
      for (Index i = 0; i < n_; ++i) out[i] = stream.normal();
      break;
    case Method::circulant: {
      const Index m = sqrt_eigenvalues_.size();
      std::vector<std::complex<double>> weighted(static_cast<std::size_t>(m));
      for (Index k = 0; k < m; ++k) {
        const double a = stream.normal();
        const double b = stream.normal();
        weighted[static_cast<std::size_t>(k)] = sqrt_eigenvalues_[k] * std::complex<double>(a, b);
      }
      std::vector<std::complex<double>> field;
      Eigen::FFT<double> fft;
      fft.fwd(field, weighted);
      for (Index i = 0; i < n_; ++i) out[i] = field[static_cast<std::size_t>(i)].real();
      break;
    }
    case Method::dense: {
      Vector z(n_);
      for (Index i = 0; i < n_; ++i) z[i] = stream.normal();
      out.noalias() = cholesky_.triangularView<Eigen::Lower>() * z;
      break;
    }
  }
  return out;
}

Vector gen_fgn(double hurst, Index n, RandomStream& stream) { return FgnGenerator(hurst, n).sample(stream); }

RealPath gen_fbm_path(double hurst, const TimeGrid& grid, RandomStream& stream) {
  grid.validate();
  const Vector noise = gen_fgn(hurst, grid.steps, stream);
  const double scale = std::pow(grid.dt, hurst);
  Vector values(grid.points());
  values[0] = 0.0;
  double acc = 0.0;
  for (Index k = 0; k < grid.steps; ++k) {
    acc += noise[k];
    values[k + 1] = scale * acc;
  }
  return RealPath(grid.dt, std::move(values));
}

// ---------------------------------------------------------------------------

FbmSampler::FbmSampler(double hurst, Vector times) : hurst_(hurst), times_(std::move(times)) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("rng-sampling", "Hurst index must lie in (0, 1)");
  const Index n = times_.size();
  if (n < 1) throw ParameterError("rng-sampling", "empty time set");
  for (Index i = 0; i < n; ++i) {
    if (!(times_[i] > 0.0) || (i > 0 && !(times_[i] > times_[i - 1]))) {
      throw ParameterError("rng-sampling", "times must be positive and strictly increasing");
    }
  }
  if (n > 2 * FgnGenerator::kDenseLimit) throw ResourceError("rng-sampling", "too many fBm sample times");

  scale_ = times_.array().pow(hurst);
  Matrix corr(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double ratio = std::pow(times_[j] / times_[i], hurst);
      const double gap = std::pow(std::abs(times_[i] - times_[j]), 2.0 * hurst) / (scale_[i] * scale_[j]);
      corr(i, j) = corr(j, i) = 0.5 * (ratio + 1.0 / ratio - gap);
    }
  }
  Eigen::LLT<Matrix> llt(corr);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr);
  if (eig.info() != Eigen::Success) throw NumericError("rng-sampling", "fBm correlation factorisation failed");
  triangular_ = false;
  factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector FbmSampler::sample(RandomStream& stream, std::optional<double> stop_at) const {
  const Index n = times_.size();
  Vector z(n);
  if (!triangular_) {
    for (Index i = 0; i < n; ++i) z[i] = stream.normal();
    Vector out = scale_.cwiseProduct(factor_ * z);
    if (stop_at) {
      for (Index i = 0; i < n; ++i)
        if (out[i] >= *stop_at) return out.head(i + 1);
    }
    return out;
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    z[i] = stream.normal();
    out[i] = scale_[i] * factor_.row(i).head(i + 1).dot(z.head(i + 1));
    if (stop_at && out[i] >= *stop_at) return out.head(i + 1);
  }
  return out;
}

Vector log_time_grid(double t_min, double t_max, double log_step) {
  if (!(t_min > 0.0 && t_max > t_min && log_step > 0.0)) {
    throw ParameterError("rng-sampling", "log grid needs 0 < t_min < t_max and a positive step");
  }
  const double u0 = std::log(t_min);
  const auto count = static_cast<Index>(std::floor((std::log(t_max) - u0) / log_step)) + 1;
  Vector out(count);
  for (Index i = 0; i < count; ++i) out[i] = std::exp(u0 + log_step * static_cast<double>(i));
  return out;
}

}  // namespace rwrt
