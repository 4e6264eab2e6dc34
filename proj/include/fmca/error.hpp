#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmca {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GridMismatchError : public Error {
public:
  GridMismatchError() : Error("functions are defined on different grids") {}
  explicit GridMismatchError(const std::string& what) : Error(what) {}
};

class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

/// No observation falls inside the kernel window of some evaluation point.
class BandwidthTooSmallError : public Error {
public:
  BandwidthTooSmallError(double point, double bandwidth)
      : Error("bandwidth " + std::to_string(bandwidth) + " leaves no data near t = " +
              std::to_string(point)),
        point_(point), bandwidth_(bandwidth) {}

  double point() const { return point_; }
  double bandwidth() const { return bandwidth_; }

private:
  double point_;
  double bandwidth_;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

class DegenerateError : public Error {
public:
  using Error::Error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

/// Kernel average at a location whose support window contains no sample point.
///
/// `nearest_distance` is the max-norm distance to the closest embedded point,
/// i.e. the smallest bandwidth that would make the window non-empty.
/// `max_feasible_alpha` is only meaningful for manifold modes.
class EmptyNeighborhoodError : public Error {
public:
  EmptyNeighborhoodError(double nearest_distance, double bandwidth, double max_feasible_alpha = 0.0)
      : Error("empty kernel neighborhood: bandwidth " + std::to_string(bandwidth) +
              ", nearest point at max-norm distance " + std::to_string(nearest_distance)),
        nearest_distance_(nearest_distance), bandwidth_(bandwidth),
        max_feasible_alpha_(max_feasible_alpha) {}

  double nearest_distance() const { return nearest_distance_; }
  double bandwidth() const { return bandwidth_; }
  double max_feasible_alpha() const { return max_feasible_alpha_; }

private:
  double nearest_distance_;
  double bandwidth_;
  double max_feasible_alpha_;
};

class NoValidEpsilonError : public Error {
public:
  NoValidEpsilonError(std::string what, std::vector<std::vector<std::size_t>> component_sizes)
      : Error(std::move(what)), component_sizes_(std::move(component_sizes)) {}

  /// Component sizes (largest first) for each rejected candidate.
  const std::vector<std::vector<std::size_t>>& component_sizes() const { return component_sizes_; }

private:
  std::vector<std::vector<std::size_t>> component_sizes_;
};

class CvInfeasibleError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  /// line 0 means the failure is not tied to a line (structured documents).
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

} // namespace fmca
