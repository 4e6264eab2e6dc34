#pragma once

#include "fmca/grid.hpp"
#include "fmca/random.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace testing {

inline fmca::GridPtr uniform(double lo, double hi, std::size_t n) { return fmca::Grid::uniform(lo, hi, n); }

inline double max_abs_diff(const fmca::GridFunction& a, const fmca::GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Points in the plane with an integer-free distance matrix.
inline Eigen::MatrixXd random_points(fmca::Rng& rng, int n, int d) {
  Eigen::MatrixXd p(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) p(i, k) = rng.normal();
  return p;
}

inline Eigen::MatrixXd euclidean(const Eigen::MatrixXd& p) {
  Eigen::MatrixXd D(p.rows(), p.rows());
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.rows(); ++j) D(i, j) = (p.row(i) - p.row(j)).norm();
  return D;
}

} // namespace testing
