#pragma once

#include "fmca/geodesic.hpp"
#include "fmca/grid.hpp"
#include "fmca/manifold.hpp"
#include "fmca/mds.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fmca {

/// Candidate grids and fold layout for joint selection of (epsilon, delta, h).
struct CvConfig {
  std::vector<double> epsilon_candidates;
  /// Share of lowest-density subjects to penalize; mapped to delta per epsilon.
  std::vector<double> delta_fractions{0.0, 0.02, 0.05, 0.10};
  /// Explicit bandwidths; empty means an 8-step geometric ladder per embedding.
  std::vector<double> h_candidates;
  std::size_t h_count = 8;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t dim = 1;
  GeodesicLength length = GeodesicLength::Unpenalized;
  int max_doublings = 3;
};

struct CvRow {
  double epsilon = 0.0;
  double delta_fraction = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double mspe = 0.0; // +inf when some validation subject had no neighbors
  std::vector<double> fold_sspe;
  std::size_t retained = 0;
};

struct CvReport {
  std::vector<CvRow> table;
  std::size_t best = 0;

  const CvRow& best_row() const { return table.at(best); }
};

/// Geodesic distances and MDS spectrum of the largest component for one (epsilon, delta).
struct Geometry {
  double epsilon = 0.0;
  double delta_fraction = 0.0;
  double delta = 0.0;
  GeodesicResult geodesic;
  std::vector<std::size_t> retained; // largest component, ascending subject index
  DistanceMatrix distances;          // geodesic distances restricted to `retained`
  std::optional<MdsSpectrum> spectrum;

  Embedding embed(std::size_t d) const;
};

Geometry compute_geometry(const DistanceMatrix& D, double epsilon, double delta_fraction,
                          GeodesicLength length = GeodesicLength::Unpenalized);

/// Seeded shuffle followed by round-robin assignment; sizes differ by at most one.
std::vector<std::vector<std::size_t>> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/// Geometric ladder from the median nearest-neighbor distance to half the diameter.
std::vector<double> embedding_bandwidths(const Eigen::MatrixXd& coordinates, std::size_t count = 8);

/// K-fold cross-validation of the kernel inverse map against observed measurements.
/// `curves` and `D` are indexed like `samples`.
CvReport cross_validate(std::span<const CurveSample> samples, std::span<const GridFunction> curves,
                        const DistanceMatrix& D, const CvConfig& config);
/// Same, with D computed as quadrature L2 distances of `curves`.
CvReport cross_validate(std::span<const CurveSample> samples, std::span<const GridFunction> curves,
                        const CvConfig& config);

/// Mean squared L2 prediction error.
double mspe(std::span<const GridFunction> truth, std::span<const GridFunction> predictions);
/// Squared prediction error relative to predicting the sample average curve.
double rspe(std::span<const GridFunction> truth, std::span<const GridFunction> predictions);

void write_cv_csv(std::ostream& out, const CvReport& report);

} // namespace fmca
