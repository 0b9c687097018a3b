#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwrt {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using LatticeVector = VectorX<std::int64_t>;

// Every error names the module that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};
class RangeError : public Error {
 public:
  using Error::Error;
};
class TruncationError : public Error {
 public:
  using Error::Error;
};
class NumericError : public Error {
 public:
  using Error::Error;
};
class ResourceError : public Error {
 public:
  using Error::Error;
};
class UnsupportedError : public Error {
 public:
  using Error::Error;
};
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Uniform grid 0, dt, 2dt, ..., steps*dt.
struct TimeGrid {
  double dt = 1.0;
  Index steps = 1;

  static TimeGrid unit(Index steps) { return TimeGrid{1.0 / static_cast<double>(steps), steps}; }
  static TimeGrid span(double horizon, Index steps) {
    return TimeGrid{horizon / static_cast<double>(steps), steps};
  }

  double horizon() const { return dt * static_cast<double>(steps); }
  double at(Index k) const { return dt * static_cast<double>(k); }
  Index points() const { return steps + 1; }
  Vector times() const { return Vector::LinSpaced(points(), 0.0, horizon()); }

  /// Grid index of time t; throws if t is not (within rounding) a grid node.
  Index index_of(double t) const;
  void validate() const;
};

/// Real-valued path sampled on a uniform grid starting at t = 0.
struct RealPath {
  double dt = 1.0;
  Vector values;

  RealPath() = default;
  RealPath(double dt_, Vector values_) : dt(dt_), values(std::move(values_)) {}

  Index steps() const { return values.size() - 1; }
  double horizon() const { return dt * static_cast<double>(steps()); }
  TimeGrid grid() const { return TimeGrid{dt, steps()}; }
  Vector times() const { return grid().times(); }
  /// Linear interpolation at time t in [0, horizon].
  double at(double t) const;
};

}  // namespace rwrt
