#include "fmca/fpca.hpp"

#include "fmca/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fmca {

std::string_view score_method_name(ScoreMethod m) {
  switch (m) {
  case ScoreMethod::Auto: return "auto";
  case ScoreMethod::Integration: return "integration";
  case ScoreMethod::Conditional: return "conditional";
  }
  return "auto";
}

ScoreMethod parse_score_method(std::string_view name) {
  if (name == "auto") return ScoreMethod::Auto;
  if (name == "integration") return ScoreMethod::Integration;
  if (name == "conditional") return ScoreMethod::Conditional;
  throw InvalidArgumentError("unknown score method '" + std::string(name) + "'");
}

double FpcaModel::covariance(double t, double s) const {
  double c = 0.0;
  for (std::size_t k = 0; k < eigenfunctions.size(); ++k)
    c += eigenvalues[k] * eigenfunctions[k].at(t) * eigenfunctions[k].at(s);
  return c;
}

GridFunction FpcaModel::fitted_curve(std::size_t i, std::size_t k) const {
  std::vector<double> row(static_cast<std::size_t>(scores.cols()));
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
  return reconstruct(mean, eigenfunctions, row, k);
}

std::vector<Observation> pool_observations(std::span<const CurveSample> samples) {
  std::vector<Observation> pooled;
  for (const auto& s : samples)
    for (std::size_t j = 0; j < s.size(); ++j) pooled.push_back({s.times[j], s.values[j]});
  return pooled;
}

GridPtr working_grid(std::span<const CurveSample> samples, std::size_t size) {
  if (samples.empty()) throw InsufficientDataError("no samples");
  double lo = samples.front().times.front(), hi = lo;
  for (const auto& s : samples) {
    lo = std::min(lo, s.times.front());
    hi = std::max(hi, s.times.back());
  }
  return Grid::uniform(lo, hi, size);
}

GridFunction estimate_mean(std::span<const CurveSample> samples, GridPtr grid, double h_mean, Kernel kernel) {
  const auto pooled = pool_observations(samples);
  if (pooled.empty()) throw InsufficientDataError("no observations for mean estimation");
  return local_linear_smooth_1d(pooled, std::move(grid), h_mean, kernel);
}

namespace {

std::vector<Observation2> raw_covariances(std::span<const CurveSample> samples, const GridFunction& mean) {
  std::vector<Observation2> raw;
  for (const auto& s : samples) {
    std::vector<double> r(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) r[j] = s.values[j] - mean.at(s.times[j]);
    for (std::size_t j = 0; j < s.size(); ++j)
      for (std::size_t l = 0; l < s.size(); ++l)
        if (j != l) raw.push_back({s.times[j], s.times[l], r[j] * r[l]});
  }
  return raw;
}

std::vector<Observation> squared_residuals(std::span<const CurveSample> samples, const GridFunction& mean) {
  std::vector<Observation> out;
  for (const auto& s : samples)
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double r = s.values[j] - mean.at(s.times[j]);
      out.push_back({s.times[j], r * r});
    }
  return out;
}

} // namespace

CovarianceEstimate estimate_covariance(std::span<const CurveSample> samples, const GridFunction& mean,
                                       double h_cov, Kernel kernel) {
  if (samples.size() < 2) throw InsufficientDataError("covariance estimation needs at least two subjects");
  for (const auto& s : samples)
    if (s.size() < 2) throw InsufficientDataError("subject " + s.subject_id + " has fewer than two measurements");
  const Grid& grid = mean.grid();
  CovarianceEstimate est;
  est.surface = local_linear_smooth_2d(raw_covariances(samples, mean), grid, h_cov, kernel);

  const auto variance = local_linear_smooth_1d(squared_residuals(samples, mean), mean.grid_ptr(), h_cov, kernel);
  const double lo = grid.lower() + 0.25 * grid.length();
  const double hi = grid.upper() - 0.25 * grid.length();
  double gap = 0.0;
  std::size_t count = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g] < lo || grid[g] > hi) continue;
    const auto gi = static_cast<Eigen::Index>(g);
    gap += variance[g] - est.surface(gi, gi);
    ++count;
  }
  est.sigma2 = count > 0 ? std::max(0.0, gap / static_cast<double>(count)) : 0.0;
  return est;
}

EigenDecomposition eigendecompose(const Surface& surface, GridPtr grid) {
  const auto n = static_cast<Eigen::Index>(grid->size());
  if (surface.rows() != n || surface.cols() != n) throw GridMismatchError();
  Eigen::VectorXd sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_w(i) = std::sqrt(grid->weights()[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd weighted = sqrt_w.asDiagonal() * (0.5 * (surface + surface.transpose())) * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weighted);
  if (solver.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");

  EigenDecomposition out;
  for (Eigen::Index c = n - 1; c >= 0; --c) {
    const double lambda = solver.eigenvalues()(c);
    if (!(lambda > 0.0)) break;
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) phi[static_cast<std::size_t>(i)] = solver.eigenvectors()(i, c) / sqrt_w(i);
    GridFunction f(grid, std::move(phi));
    double mass = integral(f);
    double scale = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) scale += grid->weights()[i] * std::abs(f[i]);
    if (std::abs(mass) <= 1e-12 * scale) {
      mass = 0.0;
      double peak = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) peak = std::max(peak, std::abs(f[i]));
      for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > 1e-12 * peak) {
          mass = f[i];
          break;
        }
    }
    if (mass < 0.0) f *= -1.0;
    out.eigenvalues.push_back(lambda);
    out.eigenfunctions.push_back(std::move(f));
  }
  return out;
}

std::vector<double> scores_integration(const CurveSample& sample, const GridFunction& mean,
                                       std::span<const GridFunction> eigenfunctions) {
  std::vector<double> scores(eigenfunctions.size(), 0.0);
  double previous = mean.grid().lower();
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double t = sample.times[j];
    const double step = t - previous;
    previous = t;
    const double r = sample.values[j] - mean.at(t);
    for (std::size_t k = 0; k < eigenfunctions.size(); ++k) scores[k] += r * eigenfunctions[k].at(t) * step;
  }
  return scores;
}

std::vector<double> scores_conditional(const CurveSample& sample, const FpcaModel& model) {
  if (model.sigma2 < 0.0) throw InvalidArgumentError("negative noise variance");
  const auto m = static_cast<Eigen::Index>(sample.size());
  const std::size_t K = model.components();
  Eigen::MatrixXd phi(m, static_cast<Eigen::Index>(K));
  Eigen::VectorXd resid(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = sample.times[static_cast<std::size_t>(j)];
    resid(j) = sample.values[static_cast<std::size_t>(j)] - model.mean.at(t);
    for (std::size_t k = 0; k < K; ++k) phi(j, static_cast<Eigen::Index>(k)) = model.eigenfunctions[k].at(t);
  }
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) lambda(static_cast<Eigen::Index>(k)) = model.eigenvalues[k];
  Eigen::MatrixXd sigma = phi * lambda.asDiagonal() * phi.transpose();
  double ridge = model.sigma2;
  if (!(ridge > 0.0)) ridge = 1e-8 * std::max(sigma.diagonal().maxCoeff(), 0.0);
  sigma.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success || !(ridge > 0.0))
    throw NumericError("measurement covariance of subject " + sample.subject_id + " is not invertible");
  const Eigen::VectorXd solved = llt.solve(resid);
  std::vector<double> scores(K);
  for (std::size_t k = 0; k < K; ++k)
    scores[k] = model.eigenvalues[k] * phi.col(static_cast<Eigen::Index>(k)).dot(solved);
  return scores;
}

std::size_t select_K_fve(std::span<const double> eigenvalues, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgumentError("FVE alpha must lie in (0, 1)");
  double total = 0.0;
  for (double l : eigenvalues) total += std::max(l, 0.0);
  if (!(total > 0.0)) throw DegenerateError("all eigenvalues are zero");
  double cum = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    cum += std::max(eigenvalues[k], 0.0);
    if (cum / total >= 1.0 - alpha - 1e-12) return k + 1;
  }
  return eigenvalues.size();
}

GridFunction reconstruct(const GridFunction& mean, std::span<const GridFunction> eigenfunctions,
                         std::span<const double> scores, std::size_t K) {
  if (K > eigenfunctions.size() || K > scores.size())
    throw InvalidArgumentError("truncation exceeds available components");
  std::vector<double> v(mean.values().begin(), mean.values().end());
  for (std::size_t k = 0; k < K; ++k) {
    if (!same_grid(eigenfunctions[k].grid(), mean.grid())) throw GridMismatchError();
    for (std::size_t g = 0; g < v.size(); ++g) v[g] += scores[k] * eigenfunctions[k][g];
  }
  return GridFunction(mean.grid_ptr(), std::move(v));
}

GridFunction linear_mode(std::size_t j, double alpha, const FpcaModel& model) {
  if (j < 1 || j > model.components()) throw InvalidArgumentError("mode index out of range");
  return model.mean + model.eigenfunctions[j - 1] * (alpha * std::sqrt(model.eigenvalues[j - 1]));
}

FpcaModel fit_fpca(std::span<const CurveSample> samples, GridPtr grid, const FpcaOptions& options) {
  if (samples.size() < 2) throw InsufficientDataError("FPCA needs at least two subjects");
  for (const auto& s : samples) s.validate();
  const auto candidates = bandwidth_candidates(*grid, options.bandwidth_candidates);

  const auto pooled = pool_observations(samples);
  const double h_mean =
      options.h_mean > 0.0 ? options.h_mean : select_bandwidth_1d(pooled, *grid, options.kernel, candidates);
  GridFunction mean = local_linear_smooth_1d(pooled, grid, h_mean, options.kernel);

  const auto raw = raw_covariances(samples, mean);
  const double h_cov =
      options.h_cov > 0.0 ? options.h_cov : select_bandwidth_2d(raw, *grid, options.kernel, candidates);
  const auto cov = estimate_covariance(samples, mean, h_cov, options.kernel);
  auto eig = eigendecompose(cov.surface, grid);
  if (eig.eigenvalues.empty()) throw DegenerateError("covariance surface has no positive eigenvalue");

  FpcaModel model;
  model.mean = std::move(mean);
  for (double l : eig.eigenvalues) model.total_variance += l;
  model.K = select_K_fve(eig.eigenvalues, options.fve_alpha);
  const std::size_t keep = std::min(eig.eigenvalues.size(), std::max(model.K, options.max_components));
  model.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + static_cast<std::ptrdiff_t>(keep));
  model.eigenfunctions.assign(eig.eigenfunctions.begin(), eig.eigenfunctions.begin() + static_cast<std::ptrdiff_t>(keep));
  model.sigma2 = cov.sigma2;
  model.h_mean = h_mean;
  model.h_cov = h_cov;
  model.kernel = options.kernel;

  ScoreMethod method = options.score_method;
  if (method == ScoreMethod::Auto) {
    std::vector<std::size_t> sizes;
    for (const auto& s : samples) sizes.push_back(s.size());
    std::nth_element(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(sizes.size() / 2), sizes.end());
    double median = static_cast<double>(sizes[sizes.size() / 2]);
    if (sizes.size() % 2 == 0) {
      const auto lower = *std::max_element(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(sizes.size() / 2));
      median = 0.5 * (median + static_cast<double>(lower));
    }
    method = median < 20.0 ? ScoreMethod::Conditional : ScoreMethod::Integration;
  }
  model.score_method = method;

  model.scores.resize(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(keep));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto xi = method == ScoreMethod::Conditional ? scores_conditional(samples[i], model)
                                                        : scores_integration(samples[i], model.mean, model.eigenfunctions);
    for (std::size_t k = 0; k < keep; ++k) model.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = xi[k];
    model.subject_ids.push_back(samples[i].subject_id);
  }
  return model;
}

} // namespace fmca
