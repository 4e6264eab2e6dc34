#pragma once

#include "fmca/fpca.hpp"
#include "fmca/geodesic.hpp"
#include "fmca/manifold.hpp"
#include "fmca/selection.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fmca {

/// Which preliminary curve estimate feeds distances and kernel averages.
enum class CurveSource {
  KarhunenLoeve, // truncated expansion with FVE-selected K
  Presmooth,     // per-subject Nadaraya-Watson smoothing
};

std::string_view curve_source_name(CurveSource s);
CurveSource parse_curve_source(std::string_view name);
std::string_view geodesic_length_name(GeodesicLength g);
GeodesicLength parse_geodesic_length(std::string_view name);

struct FitOptions {
  std::size_t grid_size = 101;
  FpcaOptions fpca;
  CurveSource curve_source = CurveSource::KarhunenLoeve;
  double h_presmooth = 0.0; // <= 0 selects by pooled GCV
  std::vector<int> epsilon_knn{5, 8, 12};
  std::vector<double> epsilon_values; // explicit candidates override epsilon_knn
  std::vector<double> delta_fractions{0.0, 0.02, 0.05, 0.10};
  std::size_t h_count = 8;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t dim = 0; // 0 chooses by fraction of distances explained
  double beta = 0.05;
  std::size_t d_max = 10;
  double max_disconnected_fraction = 0.05;
  GeodesicLength length = GeodesicLength::Unpenalized;
  int max_doublings = 3;
};

/// Preliminary estimates shared by every manifold fit on one data set.
struct Preliminary {
  GridPtr grid;
  FpcaModel fpca;
  std::vector<GridFunction> curves;
  DistanceMatrix l2;
  double h_presmooth = 0.0;
};

Preliminary preliminary_fit(std::span<const CurveSample> samples, const FitOptions& options);

/// Outcome of cross-validated selection at one embedding dimension.
struct DimensionFit {
  std::size_t d = 0;
  CvReport cv;
  double fde = 0.0;
  double epsilon = 0.0;
  double delta_fraction = 0.0;
  double delta = 0.0;
  std::vector<std::size_t> retained;
  ManifoldModel model;
};

DimensionFit fit_dimension(std::span<const CurveSample> samples, std::span<const GridFunction> curves,
                           const DistanceMatrix& D, CvConfig config);

struct FitResult {
  Preliminary prelim;
  std::vector<std::string> subject_ids;
  std::vector<double> epsilon_candidates; // after the connectivity filter
  std::vector<double> fde_by_dim;         // FDE of the CV-optimal geometry, d = 1, 2, ...
  bool dim_converged = true;
  DimensionFit chosen;
  std::vector<std::size_t> excluded;      // subjects outside the largest component
};

FitResult fit_manifold(std::span<const CurveSample> samples, const FitOptions& options = {});

/// Epsilon candidates from nearest-neighbor ranks (or explicit values), filtered for connectivity.
std::vector<double> epsilon_candidates(const DistanceMatrix& D, const FitOptions& options);

CvConfig cv_config(const FitOptions& options, std::vector<double> epsilons, std::size_t dim);

} // namespace fmca
