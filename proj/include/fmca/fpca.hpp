#pragma once

#include "fmca/grid.hpp"
#include "fmca/kernel.hpp"
#include "fmca/smoothing.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace fmca {

enum class ScoreMethod {
  Auto,        // conditional when the median subject has fewer than 20 points
  Integration, // Riemann sums over each subject's own times
  Conditional, // best linear prediction given the covariance model
};

std::string_view score_method_name(ScoreMethod m);
ScoreMethod parse_score_method(std::string_view name);

struct FpcaOptions {
  Kernel kernel = Kernel::Epanechnikov;
  double h_mean = 0.0; // <= 0 selects by GCV
  double h_cov = 0.0;  // <= 0 selects by GCV
  std::size_t bandwidth_candidates = 10;
  double fve_alpha = 0.05;
  ScoreMethod score_method = ScoreMethod::Auto;
  /// Upper bound on stored eigenpairs (the FVE choice is always kept).
  std::size_t max_components = 20;
};

/// Mean, covariance eigenpairs, noise variance and per-subject scores.
struct FpcaModel {
  GridFunction mean;
  std::vector<double> eigenvalues;        // nonincreasing, positive
  std::vector<GridFunction> eigenfunctions; // L2-orthonormal on the grid
  double total_variance = 0.0;            // sum over the whole positive spectrum
  double sigma2 = 0.0;
  Eigen::MatrixXd scores;                 // subjects x eigenfunctions.size()
  std::size_t K = 0;                      // FVE truncation
  double h_mean = 0.0;
  double h_cov = 0.0;
  Kernel kernel = Kernel::Epanechnikov;
  ScoreMethod score_method = ScoreMethod::Integration; // resolved, never Auto
  std::vector<std::string> subject_ids;

  const Grid& grid() const { return mean.grid(); }
  GridPtr grid_ptr() const { return mean.grid_ptr(); }
  std::size_t components() const { return eigenfunctions.size(); }
  /// Covariance implied by the stored eigenpairs at (t, s).
  double covariance(double t, double s) const;
  /// Truncated Karhunen-Loeve fit of subject i with `k` components.
  GridFunction fitted_curve(std::size_t i, std::size_t k) const;
};

struct CovarianceEstimate {
  Surface surface;
  double sigma2 = 0.0;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;
  std::vector<GridFunction> eigenfunctions;
};

std::vector<Observation> pool_observations(std::span<const CurveSample> samples);

GridFunction estimate_mean(std::span<const CurveSample> samples, GridPtr grid, double h_mean,
                           Kernel kernel = Kernel::Epanechnikov);

/// Smooths off-diagonal raw covariances; sigma2 is the average gap between the
/// smoothed variance of the observations and the surface diagonal over the middle
/// half of the domain, floored at zero.
CovarianceEstimate estimate_covariance(std::span<const CurveSample> samples, const GridFunction& mean,
                                       double h_cov, Kernel kernel = Kernel::Epanechnikov);

/// Eigenpairs of the covariance operator discretized with trapezoidal weights.
/// Non-positive eigenvalues are dropped; each eigenfunction is oriented to have a
/// nonnegative integral (ties: first nonzero value positive).
EigenDecomposition eigendecompose(const Surface& surface, GridPtr grid);

std::vector<double> scores_integration(const CurveSample& sample, const GridFunction& mean,
                                       std::span<const GridFunction> eigenfunctions);

std::vector<double> scores_conditional(const CurveSample& sample, const FpcaModel& model);

/// Smallest k whose cumulative share of the spectrum reaches 1 - alpha.
std::size_t select_K_fve(std::span<const double> eigenvalues, double alpha);

GridFunction reconstruct(const GridFunction& mean, std::span<const GridFunction> eigenfunctions,
                         std::span<const double> scores, std::size_t K);

/// X_{j,alpha} = mean + alpha * sqrt(lambda_j) * phi_j, with j counted from 1.
GridFunction linear_mode(std::size_t j, double alpha, const FpcaModel& model);

FpcaModel fit_fpca(std::span<const CurveSample> samples, GridPtr grid, const FpcaOptions& options = {});

/// Working grid of `size` equally spaced points over the pooled time range.
GridPtr working_grid(std::span<const CurveSample> samples, std::size_t size = 101);

} // namespace fmca
