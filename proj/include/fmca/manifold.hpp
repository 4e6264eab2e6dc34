#pragma once

#include "fmca/fpca.hpp"
#include "fmca/grid.hpp"
#include "fmca/mds.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace fmca {

/// Eigen-directions of the sample covariance (n - 1 denominator) of the embedding rows.
struct FmcDecomposition {
  Eigen::VectorXd eigenvalues; // nonincreasing, clipped at zero
  Eigen::MatrixXd vectors;     // orthonormal columns, largest-magnitude entry positive
};

FmcDecomposition fmc_decompose(const Embedding& embedding);

/// Fitted representation: embedding, the curves it indexes, and the bandwidth of
/// the product Epanechnikov kernel used to map coordinates back to curves.
struct ManifoldModel {
  Embedding embedding;
  std::vector<GridFunction> fitted_curves; // one per embedding row
  double h = 0.0;
  Eigen::VectorXd mean_coords;
  Eigen::VectorXd fmc_eigenvalues;
  Eigen::MatrixXd fmc_vectors;

  static ManifoldModel build(Embedding embedding, std::vector<GridFunction> fitted_curves, double h);

  std::size_t n() const { return fitted_curves.size(); }
  std::size_t d() const { return embedding.d(); }
};

/// Product Epanechnikov kernel (3/4)^d prod (1 - u_k^2) 1(|u_k| < 1).
double product_epanechnikov(const Eigen::Ref<const Eigen::VectorXd>& u);

/// Normalized kernel weights of the rows of `coords` around theta. Rows with
/// include[i] == 0 get weight zero (an empty mask includes every row).
/// Throws EmptyNeighborhoodError when the total weight is zero.
std::vector<double> kernel_weights(const Eigen::MatrixXd& coords, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                   double h, std::span<const char> include = {});

/// Kernel average of curves around theta. On an empty neighborhood the bandwidth
/// is doubled up to `max_doublings` times before the error propagates.
GridFunction kernel_average(const Eigen::MatrixXd& coords, std::span<const GridFunction> curves,
                            const Eigen::Ref<const Eigen::VectorXd>& theta, double h,
                            std::span<const char> include = {}, int max_doublings = 0);

GridFunction inverse_map(const Eigen::Ref<const Eigen::VectorXd>& theta, const ManifoldModel& model,
                         int max_doublings = 0);

/// Leave-self-out kernel average at the subject's own embedding row.
GridFunction predict_curve(std::size_t row, const ManifoldModel& model, int max_doublings = 0);

std::vector<GridFunction> predict_all_loo(const ManifoldModel& model, int max_doublings = 0);

GridFunction manifold_mean(const ManifoldModel& model, int max_doublings = 0);

/// Inverse map at mean + alpha * sqrt(lambda_j) * e_j, with j counted from 1.
/// An empty neighborhood reports the largest feasible |alpha| on that side.
GridFunction manifold_mode(std::size_t j, double alpha, const ManifoldModel& model, int max_doublings = 0);

struct FmcScores {
  Eigen::MatrixXd scores; // n x d
};

FmcScores fmc_scores(const ManifoldModel& model);

} // namespace fmca
