#pragma once

#include "fmca/grid.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fmca {

using DistanceMatrix = Eigen::MatrixXd;

/// Quadrature L2 distances between curves on one grid.
DistanceMatrix pairwise_l2(std::span<const GridFunction> curves);
/// Euclidean distances between the first `K` columns of a score matrix, which equal
/// the L2 distances of the truncated reconstructions for orthonormal eigenfunctions.
DistanceMatrix pairwise_score_distance(const Eigen::MatrixXd& scores, std::size_t K);

/// rho_i = #{ j != i : D(i, j) < epsilon }.
std::vector<int> local_density(const DistanceMatrix& D, double epsilon);

/// Penalty applied on an edge whose smaller endpoint density is rho.
/// rho^-2 when rho < delta, zero otherwise; rho = 0 is capped at kPenaltyCap.
inline constexpr double kPenaltyCap = 1e6;
double density_penalty(int rho, double delta);

struct Edge {
  std::size_t from;
  std::size_t to;
  double l2;
  double penalty;
  double weight; // l2 * (1 + penalty)
};

/// Epsilon-neighborhood graph with density-penalized weights; every undirected
/// edge is stored in both directions, grouped by `from`.
struct NeighborhoodGraph {
  std::size_t n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<int> density;
  std::vector<Edge> edges;
  std::vector<std::size_t> offsets; // edges[offsets[v] .. offsets[v+1]) leave v

  std::span<const Edge> out_edges(std::size_t v) const {
    return std::span<const Edge>(edges).subspan(offsets[v], offsets[v + 1] - offsets[v]);
  }
};

NeighborhoodGraph build_graph(const DistanceMatrix& D, double epsilon, double delta);

enum class GeodesicLength {
  Unpenalized, // L2 length of the penalized-optimal path
  Penalized,   // the optimal penalized weight itself
};

struct GeodesicResult {
  DistanceMatrix distances; // unpenalized length of the selected path; +inf across components
  DistanceMatrix penalized; // minimal penalized weight; +inf across components
  std::vector<std::size_t> component_of;
  /// Vertex sets, largest first (ties: smaller first vertex first); each sorted.
  std::vector<std::vector<std::size_t>> components;

  const DistanceMatrix& lengths(GeodesicLength kind) const {
    return kind == GeodesicLength::Penalized ? penalized : distances;
  }
  const std::vector<std::size_t>& largest_component() const { return components.front(); }
};

/// Dijkstra from every vertex with a binary heap; ties resolved by smaller vertex index.
GeodesicResult all_pairs_geodesic(const NeighborhoodGraph& graph);

/// Component sizes of the epsilon graph, largest first.
std::vector<std::size_t> component_sizes(const DistanceMatrix& D, double epsilon);

/// Candidates whose largest epsilon-component holds at least 1 - max_disconnected_fraction
/// of the vertices. Throws NoValidEpsilonError if none survives.
std::vector<double> min_epsilon_for_connectivity(const DistanceMatrix& D, std::span<const double> candidates,
                                                 double max_disconnected_fraction = 0.05);

/// Smallest epsilon whose largest component holds at least 1 - max_disconnected_fraction
/// of the vertices (the next double above the bridging distance, since edges need D < epsilon).
double connectivity_lower_bound(const DistanceMatrix& D, double max_disconnected_fraction = 0.05);

/// Median over vertices of the distance to the k-th nearest other vertex, for each k.
std::vector<double> knn_epsilon_candidates(const DistanceMatrix& D, std::span<const int> ks);

/// Threshold delta such that the given fraction of vertices with the lowest density
/// satisfy rho < delta; all vertices tied with the quantile are included.
double delta_for_fraction(std::span<const int> density, double fraction);

/// CSV columns: i, j, l2_distance, penalty, weight (one row per direction).
void write_edge_csv(std::ostream& out, const NeighborhoodGraph& graph);

} // namespace fmca
