#include "fmca/grid.hpp"

#include "fmca/error.hpp"

#include <algorithm>
#include <cmath>

namespace fmca {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgumentError("grid needs at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw InvalidArgumentError("grid point is not finite");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw InvalidArgumentError("grid points must be strictly increasing");
  }
  weights_.assign(points_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const double half = 0.5 * (points_[i + 1] - points_[i]);
    weights_[i] += half;
    weights_[i + 1] += half;
  }
}

std::shared_ptr<const Grid> Grid::uniform(double lower, double upper, std::size_t size) {
  if (size < 2 || !(upper > lower)) throw InvalidArgumentError("invalid uniform grid bounds or size");
  std::vector<double> p(size);
  const double step = (upper - lower) / static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) p[i] = lower + step * static_cast<double>(i);
  p.back() = upper;
  return std::make_shared<const Grid>(std::move(p));
}

std::size_t Grid::interval(double t) const {
  if (t <= points_.front()) return 0;
  if (t >= points_.back()) return points_.size() - 2;
  auto it = std::upper_bound(points_.begin(), points_.end(), t);
  return static_cast<std::size_t>(it - points_.begin()) - 1;
}

bool same_grid(const Grid& a, const Grid& b) { return &a == &b || a == b; }

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgumentError("grid function without grid");
  if (values_.size() != grid_->size()) throw InvalidArgumentError("value count differs from grid size");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgumentError("grid function value is not finite");
}

GridFunction GridFunction::constant(GridPtr grid, double value) {
  std::vector<double> v(grid->size(), value);
  return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::at(double t) const {
  const Grid& g = *grid_;
  if (t <= g.lower()) return values_.front();
  if (t >= g.upper()) return values_.back();
  const std::size_t k = g.interval(t);
  const double w = (t - g[k]) / (g[k + 1] - g[k]);
  return (1.0 - w) * values_[k] + w * values_[k + 1];
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  if (!same_grid(*grid_, other.grid())) throw GridMismatchError();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  if (!same_grid(*grid_, other.grid())) throw GridMismatchError();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, double s) { return a *= s; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

double l2_inner(const GridFunction& f, const GridFunction& g) {
  if (!same_grid(f.grid(), g.grid())) throw GridMismatchError();
  const auto w = f.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * f[i] * g[i];
  return sum;
}

double l2_norm(const GridFunction& f) { return std::sqrt(l2_inner(f, f)); }

double l2_distance(const GridFunction& f, const GridFunction& g) {
  if (!same_grid(f.grid(), g.grid())) throw GridMismatchError();
  const auto w = f.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = f[i] - g[i];
    sum += w[i] * d * d;
  }
  return std::sqrt(sum);
}

double integral(const GridFunction& f) {
  const auto w = f.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * f[i];
  return sum;
}

GridFunction cross_sectional_mean(std::span<const GridFunction> curves) {
  if (curves.empty()) throw InsufficientDataError("mean of an empty curve set");
  GridFunction sum = GridFunction::constant(curves.front().grid_ptr(), 0.0);
  for (const auto& c : curves) sum += c;
  return sum * (1.0 / static_cast<double>(curves.size()));
}

void CurveSample::validate() const {
  if (times.size() != values.size())
    throw InvalidArgumentError("subject " + subject_id + ": times and values differ in length");
  if (times.size() < 2) throw InvalidArgumentError("subject " + subject_id + ": fewer than two measurements");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j]) || !std::isfinite(values[j]))
      throw InvalidArgumentError("subject " + subject_id + ": non-finite measurement");
    if (j > 0 && times[j] < times[j - 1])
      throw InvalidArgumentError("subject " + subject_id + ": times must be nondecreasing");
  }
}

} // namespace fmca
