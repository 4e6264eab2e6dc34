#include "fmca/manifold.hpp"

#include "fmca/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fmca {

FmcDecomposition fmc_decompose(const Embedding& embedding) {
  const auto n = embedding.coordinates.rows();
  const auto d = embedding.coordinates.cols();
  if (n < 2) throw InsufficientDataError("FMC decomposition needs at least two rows");
  const Eigen::RowVectorXd mean = embedding.coordinates.colwise().mean();
  const Eigen::MatrixXd centered = embedding.coordinates.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("FMC eigendecomposition failed");
  FmcDecomposition out;
  out.eigenvalues.resize(d);
  out.vectors.resize(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    out.eigenvalues(c) = std::max(0.0, solver.eigenvalues()(d - 1 - c));
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - c);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < d; ++i)
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    if (v(arg) < 0.0) v = -v;
    out.vectors.col(c) = v;
  }
  return out;
}

ManifoldModel ManifoldModel::build(Embedding embedding, std::vector<GridFunction> fitted_curves, double h) {
  if (fitted_curves.size() != embedding.n()) throw InvalidArgumentError("one fitted curve per embedded subject required");
  if (fitted_curves.empty()) throw InsufficientDataError("empty manifold model");
  if (!(h > 0.0)) throw InvalidArgumentError("bandwidth must be positive");
  ManifoldModel m;
  m.mean_coords = embedding.coordinates.colwise().mean().transpose();
  if (embedding.n() >= 2) {
    auto fmc = fmc_decompose(embedding);
    m.fmc_eigenvalues = std::move(fmc.eigenvalues);
    m.fmc_vectors = std::move(fmc.vectors);
  } else {
    const auto d = static_cast<Eigen::Index>(embedding.d());
    m.fmc_eigenvalues = Eigen::VectorXd::Zero(d);
    m.fmc_vectors = Eigen::MatrixXd::Identity(d, d);
  }
  m.embedding = std::move(embedding);
  m.fitted_curves = std::move(fitted_curves);
  m.h = h;
  return m;
}

double product_epanechnikov(const Eigen::Ref<const Eigen::VectorXd>& u) {
  double w = 1.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (!(std::abs(u(k)) < 1.0)) return 0.0;
    w *= 0.75 * (1.0 - u(k) * u(k));
  }
  return w;
}

namespace {

double nearest_maxnorm(const Eigen::MatrixXd& coords, const Eigen::Ref<const Eigen::VectorXd>& theta,
                       std::span<const char> include) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    if (!include.empty() && !include[static_cast<std::size_t>(i)]) continue;
    best = std::min(best, (coords.row(i).transpose() - theta).cwiseAbs().maxCoeff());
  }
  return best;
}

} // namespace

std::vector<double> kernel_weights(const Eigen::MatrixXd& coords, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                   double h, std::span<const char> include) {
  if (theta.size() != coords.cols()) throw InvalidArgumentError("location dimension differs from embedding");
  if (!include.empty() && include.size() != static_cast<std::size_t>(coords.rows()))
    throw InvalidArgumentError("inclusion mask size differs from embedding");
  std::vector<double> w(static_cast<std::size_t>(coords.rows()), 0.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    if (!include.empty() && !include[static_cast<std::size_t>(i)]) continue;
    const double k = product_epanechnikov((coords.row(i).transpose() - theta) / h);
    w[static_cast<std::size_t>(i)] = k;
    total += k;
  }
  if (!(total > 0.0)) throw EmptyNeighborhoodError(nearest_maxnorm(coords, theta, include), h);
  for (double& x : w) x /= total;
  return w;
}

GridFunction kernel_average(const Eigen::MatrixXd& coords, std::span<const GridFunction> curves,
                            const Eigen::Ref<const Eigen::VectorXd>& theta, double h,
                            std::span<const char> include, int max_doublings) {
  if (curves.size() != static_cast<std::size_t>(coords.rows()))
    throw InvalidArgumentError("one curve per embedded point required");
  std::vector<double> w;
  for (int attempt = 0;; ++attempt) {
    try {
      w = kernel_weights(coords, theta, h, include);
      break;
    } catch (const EmptyNeighborhoodError&) {
      if (attempt >= max_doublings) throw;
      h *= 2.0;
    }
  }
  std::vector<double> v(curves.front().size(), 0.0);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (w[i] == 0.0) continue;
    const auto vals = curves[i].values();
    for (std::size_t g = 0; g < v.size(); ++g) v[g] += w[i] * vals[g];
  }
  return GridFunction(curves.front().grid_ptr(), std::move(v));
}

GridFunction inverse_map(const Eigen::Ref<const Eigen::VectorXd>& theta, const ManifoldModel& model, int max_doublings) {
  return kernel_average(model.embedding.coordinates, model.fitted_curves, theta, model.h, {}, max_doublings);
}

GridFunction predict_curve(std::size_t row, const ManifoldModel& model, int max_doublings) {
  if (row >= model.n()) throw InvalidArgumentError("subject row out of range");
  std::vector<char> include(model.n(), 1);
  include[row] = 0;
  const Eigen::VectorXd theta = model.embedding.coordinates.row(static_cast<Eigen::Index>(row)).transpose();
  return kernel_average(model.embedding.coordinates, model.fitted_curves, theta, model.h, include, max_doublings);
}

std::vector<GridFunction> predict_all_loo(const ManifoldModel& model, int max_doublings) {
  std::vector<GridFunction> out;
  out.reserve(model.n());
  for (std::size_t i = 0; i < model.n(); ++i) out.push_back(predict_curve(i, model, max_doublings));
  return out;
}

GridFunction manifold_mean(const ManifoldModel& model, int max_doublings) {
  return inverse_map(model.mean_coords, model, max_doublings);
}

GridFunction manifold_mode(std::size_t j, double alpha, const ManifoldModel& model, int max_doublings) {
  if (j < 1 || j > model.d()) throw InvalidArgumentError("manifold mode axis out of range");
  const auto c = static_cast<Eigen::Index>(j - 1);
  const Eigen::VectorXd step = std::sqrt(model.fmc_eigenvalues(c)) * model.fmc_vectors.col(c);
  const Eigen::VectorXd theta = model.mean_coords + alpha * step;
  try {
    return inverse_map(theta, model, max_doublings);
  } catch (const EmptyNeighborhoodError& e) {
    // Each point is inside the window for alpha in an open interval; report the
    // outermost reachable alpha on the requested side.
    const double h = e.bandwidth();
    const auto& coords = model.embedding.coordinates;
    double reach = 0.0;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
      double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < coords.cols(); ++k) {
        const double off = coords(i, k) - model.mean_coords(k);
        if (step(k) == 0.0) {
          if (!(std::abs(off) < h)) lo = hi = 0.0;
          continue;
        }
        double a = (off - h) / step(k), b = (off + h) / step(k);
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
      }
      if (!(lo < hi)) continue;
      reach = std::max(reach, alpha >= 0.0 ? std::max(0.0, hi) : std::max(0.0, -lo));
    }
    throw EmptyNeighborhoodError(e.nearest_distance(), h, reach);
  }
}

FmcScores fmc_scores(const ManifoldModel& model) {
  const Eigen::MatrixXd centered = model.embedding.coordinates.rowwise() - model.mean_coords.transpose();
  return FmcScores{centered * model.fmc_vectors};
}

} // namespace fmca
