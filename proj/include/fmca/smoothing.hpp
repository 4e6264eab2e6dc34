#pragma once

#include "fmca/grid.hpp"
#include "fmca/kernel.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace fmca {

struct Observation {
  double t;
  double y;
};

struct Observation2 {
  double t;
  double s;
  double y;
};

/// Symmetric surface on grid x grid.
using Surface = Eigen::MatrixXd;

/// Kernel-weighted average of one subject's measurements at every grid point.
/// Throws BandwidthTooSmallError when a grid point gets zero total weight.
GridFunction nadaraya_watson_smooth(const CurveSample& sample, GridPtr grid, double h1,
                                    Kernel kernel = Kernel::Epanechnikov);

/// Local linear fit of pooled scatter data, evaluated on the grid.
///
/// Where the local design is singular (all weighted points at one location) the
/// local constant estimate is returned instead. A grid point with no data in its
/// window raises BandwidthTooSmallError.
GridFunction local_linear_smooth_1d(std::span<const Observation> pooled, GridPtr grid, double h,
                                    Kernel kernel = Kernel::Epanechnikov);

/// Local planar fit on grid x grid, symmetrized as (S + S^T) / 2.
Surface local_linear_smooth_2d(std::span<const Observation2> pooled, const Grid& grid, double h,
                               Kernel kernel = Kernel::Epanechnikov);

/// Geometric ladder of `count` bandwidths from twice the mean grid spacing to range / 4.
std::vector<double> bandwidth_candidates(const Grid& grid, std::size_t count = 10);

/// Generalized cross-validation score of the 1-d local linear smoother.
/// Infinite when the smoother interpolates or the bandwidth leaves the grid uncovered.
double gcv_score_1d(std::span<const Observation> pooled, const Grid& grid, double h, Kernel kernel);
double gcv_score_2d(std::span<const Observation2> pooled, const Grid& grid, double h, Kernel kernel);
/// Pooled GCV of per-subject Nadaraya-Watson smoothing.
double gcv_score_nw(std::span<const CurveSample> samples, const Grid& grid, double h, Kernel kernel);

/// Candidate with the smallest finite GCV score; throws BandwidthTooSmallError if none is finite.
double select_bandwidth_1d(std::span<const Observation> pooled, const Grid& grid, Kernel kernel,
                           std::span<const double> candidates);
double select_bandwidth_2d(std::span<const Observation2> pooled, const Grid& grid, Kernel kernel,
                           std::span<const double> candidates);
double select_bandwidth_nw(std::span<const CurveSample> samples, const Grid& grid, Kernel kernel,
                           std::span<const double> candidates);

} // namespace fmca
