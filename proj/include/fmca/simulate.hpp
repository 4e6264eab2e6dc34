#pragma once

#include "fmca/grid.hpp"
#include "fmca/pipeline.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fmca {

enum class ManifoldId { M1, M2, M3 };

std::string_view manifold_name(ManifoldId m);
ManifoldId parse_manifold(std::string_view name);
/// Dimension of the generating parameter space (1 for M1, 2 otherwise).
std::size_t intrinsic_dimension(ManifoldId m);

struct SimSpec {
  ManifoldId manifold = ManifoldId::M1;
  std::size_t n = 200;
  std::size_t points_per_curve = 30;
  double noise_ratio = 0.1; // noise variance over pooled signal variance
  std::uint64_t seed = 1;
  std::size_t grid_size = 101;
  double lower = -4.0;
  double upper = 4.0;

  void validate() const;
};

struct SimOutput {
  GridPtr grid;
  std::vector<CurveSample> samples;      // noisy measurements
  std::vector<GridFunction> truth;       // noiseless curves on the working grid
  std::vector<std::array<double, 2>> params; // (alpha, beta); beta is 0 for M1
  double sigma2 = 0.0;
};

/// Time warp of M1: 8 * I_x(alpha + 1, 2) - 4 with x = t / 8 + 1/2, where I is the
/// regularized incomplete beta function written out in closed form.
double m1_warp(double alpha, double t);
/// Common two-peak shape of M1.
double m1_shape(double t);
double m1_curve(double alpha, double t);
double m2_curve(double alpha, double beta, double t);
double m3_curve(double alpha, double beta, double t);
double curve_value(ManifoldId m, const std::array<double, 2>& params, double t);

SimOutput gen_m1(const SimSpec& spec);
SimOutput gen_m2(const SimSpec& spec);
SimOutput gen_m3(const SimSpec& spec);
SimOutput simulate(const SimSpec& spec);

/// y = x + N(0, sigma2) with sigma2 = R times the pooled variance of all clean values.
std::vector<CurveSample> add_noise(const std::vector<CurveSample>& clean, double noise_ratio, std::uint64_t seed,
                                   double* sigma2_out = nullptr);

struct BenchmarkOptions {
  std::size_t max_dim = 5;
  bool fpca = true;
  bool manifold = true;
  bool isomap = true;
  /// Nearest-neighbor ranks for the step-size sensitivity table; empty skips it.
  std::vector<int> knn_presets;
  FitOptions fit;
};

struct BenchmarkResult {
  SimSpec spec;
  std::size_t intrinsic_dim = 1;
  std::vector<double> fde;            // d = 1..max_dim
  std::vector<double> mspe_fpca;      // L = 1..max_dim, leave-one-out
  std::vector<double> rspe_fpca;
  std::vector<double> mspe_manifold;  // d = 1..max_dim, leave-one-out
  std::vector<double> rspe_manifold;
  std::vector<double> delta_fraction; // CV choice per d
  double mspe_isomap = 0.0;           // delta = 0 only, at the intrinsic dimension
  double isomap_ratio = 0.0;          // penalized over unpenalized MSPE
  std::vector<double> mspe_by_knn;    // aligned with knn_presets; NaN when the fit fails
  std::vector<std::size_t> retained_by_knn;
};

BenchmarkResult run_benchmark(const SimSpec& spec, const BenchmarkOptions& options);

} // namespace fmca
