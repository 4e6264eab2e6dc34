#pragma once

#include "fmca/geodesic.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace fmca {

/// Rows are the low-dimensional representations of the retained subjects.
struct Embedding {
  Eigen::MatrixXd coordinates;           // n x d, centered columns
  std::vector<double> eigenvalues;       // full spectrum of the centered Gram matrix, nonincreasing
  std::vector<std::size_t> source_indices; // subject index of each row
  bool padded = false;                   // d exceeded the number of positive eigenvalues

  std::size_t n() const { return static_cast<std::size_t>(coordinates.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(coordinates.cols()); }
  /// Magnitude of the most negative eigenvalue relative to the largest one.
  double non_euclidean_ratio() const;
};

/// Eigendecomposition of B = -1/2 J (D o D) J, reusable across target dimensions.
class MdsSpectrum {
public:
  explicit MdsSpectrum(const DistanceMatrix& D);

  /// Top-d coordinates; each column flipped so its largest-magnitude entry is positive.
  Embedding embed(std::size_t d) const;
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  std::size_t positive_count() const { return positive_; }

private:
  std::vector<double> eigenvalues_;
  Eigen::MatrixXd eigenvectors_; // columns ordered by nonincreasing eigenvalue
  std::size_t positive_ = 0;
};

Embedding classical_mds(const DistanceMatrix& D, std::size_t d);

DistanceMatrix embedding_distances(const Eigen::MatrixXd& coordinates);

/// Fraction of distances explained: 1 - ||Dhat - D||_F / ||D||_F.
double fde(const DistanceMatrix& D, const Embedding& embedding);

struct DimensionChoice {
  std::size_t d = 0;
  bool converged = false;
  std::vector<double> fde; // fde[p - 1] for p = 1..d_max (stops early once converged)
};

/// Smallest p <= d_max with ||Dhat^p - D||_F / ||D||_F < beta.
DimensionChoice select_dimension(const DistanceMatrix& D, double beta = 0.05, std::size_t d_max = 10);

} // namespace fmca
