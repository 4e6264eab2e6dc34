#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fmca {

/// Ordered evaluation points of the time domain with trapezoidal weights.
class Grid {
public:
  explicit Grid(std::vector<double> points);

  static std::shared_ptr<const Grid> uniform(double lower, double upper, std::size_t size);

  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  double lower() const { return points_.front(); }
  double upper() const { return points_.back(); }
  double length() const { return upper() - lower(); }

  /// Index k of the interval [points[k], points[k+1]] holding t (clamped to the ends).
  std::size_t interval(double t) const;

  bool operator==(const Grid& other) const { return points_ == other.points_; }

private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

bool same_grid(const Grid& a, const Grid& b);

/// A function stored by its values on a shared grid.
class GridFunction {
public:
  GridFunction() = default; // empty placeholder, no grid
  GridFunction(GridPtr grid, std::vector<double> values);

  static GridFunction constant(GridPtr grid, double value);

  template <class F>
  static GridFunction from(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*grid)[i]);
    return GridFunction(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Linear interpolation; constant extrapolation outside the grid.
  double at(double t) const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

private:
  GridPtr grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, double s);
GridFunction operator*(double s, GridFunction a);

/// Trapezoidal approximation of the L2 inner product.
double l2_inner(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);
double l2_distance(const GridFunction& f, const GridFunction& g);
/// Quadrature integral of f over the grid domain.
double integral(const GridFunction& f);

/// Pointwise average of curves sharing one grid.
GridFunction cross_sectional_mean(std::span<const GridFunction> curves);

/// One subject's irregularly timed, possibly noisy measurements.
struct CurveSample {
  std::string subject_id;
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  /// Throws InvalidArgumentError unless times are nondecreasing, sizes match,
  /// there are at least two points and everything is finite.
  void validate() const;
};

} // namespace fmca
