#include "fmca/mds.hpp"

#include "fmca/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fmca {

double Embedding::non_euclidean_ratio() const {
  if (eigenvalues.empty() || !(eigenvalues.front() > 0.0)) return 0.0;
  return std::max(0.0, -eigenvalues.back()) / eigenvalues.front();
}

MdsSpectrum::MdsSpectrum(const DistanceMatrix& D) {
  if (D.rows() != D.cols() || D.rows() == 0) throw InvalidArgumentError("MDS needs a nonempty square matrix");
  if (!D.allFinite()) throw InvalidArgumentError("MDS distance matrix must be finite");
  const auto n = D.rows();
  Eigen::MatrixXd B = -0.5 * D.cwiseProduct(D);
  const Eigen::VectorXd row_means = B.rowwise().mean();
  const Eigen::RowVectorXd col_means = B.colwise().mean();
  const double grand = B.mean();
  B.colwise() -= row_means;
  B.rowwise() -= col_means;
  B.array() += grand;
  B = 0.5 * (B + B.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success) throw NumericError("MDS eigendecomposition failed");
  eigenvalues_.resize(static_cast<std::size_t>(n));
  eigenvectors_.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    eigenvalues_[static_cast<std::size_t>(c)] = solver.eigenvalues()(n - 1 - c);
    eigenvectors_.col(c) = solver.eigenvectors().col(n - 1 - c);
  }
  const double top = std::max(eigenvalues_.front(), 0.0);
  for (double l : eigenvalues_)
    if (l > 1e-10 * top && l > 0.0) ++positive_;
}

Embedding MdsSpectrum::embed(std::size_t d) const {
  const auto n = eigenvectors_.rows();
  if (d < 1 || (n > 1 && d > static_cast<std::size_t>(n - 1)) || (n == 1 && d > 1))
    throw InvalidArgumentError("embedding dimension must lie in [1, n - 1]");
  Embedding e;
  e.eigenvalues = eigenvalues_;
  e.coordinates = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d));
  e.padded = d > positive_;
  for (std::size_t c = 0; c < std::min(d, positive_); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    Eigen::VectorXd col = eigenvectors_.col(ci) * std::sqrt(eigenvalues_[c]);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(col(i)) > std::abs(col(arg))) arg = i;
    if (col(arg) < 0.0) col = -col;
    e.coordinates.col(ci) = col;
  }
  e.source_indices.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < e.source_indices.size(); ++i) e.source_indices[i] = i;
  return e;
}

Embedding classical_mds(const DistanceMatrix& D, std::size_t d) { return MdsSpectrum(D).embed(d); }

DistanceMatrix embedding_distances(const Eigen::MatrixXd& coordinates) {
  const auto n = coordinates.rows();
  DistanceMatrix out = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (coordinates.row(i) - coordinates.row(j)).norm();
      out(i, j) = d;
      out(j, i) = d;
    }
  return out;
}

double fde(const DistanceMatrix& D, const Embedding& embedding) {
  if (D.rows() != static_cast<Eigen::Index>(embedding.n()) || D.cols() != D.rows())
    throw InvalidArgumentError("distance matrix and embedding sizes differ");
  const double norm = D.norm();
  if (!(norm > 0.0)) throw DegenerateError("distance matrix is zero");
  return 1.0 - (embedding_distances(embedding.coordinates) - D).norm() / norm;
}

DimensionChoice select_dimension(const DistanceMatrix& D, double beta, std::size_t d_max) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgumentError("beta must lie in (0, 1)");
  const MdsSpectrum spectrum(D);
  const auto n = static_cast<std::size_t>(D.rows());
  const std::size_t limit = std::max<std::size_t>(1, std::min(d_max, n > 1 ? n - 1 : 1));
  DimensionChoice choice;
  for (std::size_t p = 1; p <= limit; ++p) {
    const double f = fde(D, spectrum.embed(p));
    choice.fde.push_back(f);
    if (1.0 - f < beta) {
      choice.d = p;
      choice.converged = true;
      return choice;
    }
  }
  choice.d = limit;
  return choice;
}

} // namespace fmca
