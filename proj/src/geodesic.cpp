#include "fmca/geodesic.hpp"

#include "fmca/error.hpp"
#include "fmca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

namespace fmca {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_square(const DistanceMatrix& D) {
  if (D.rows() != D.cols()) throw InvalidArgumentError("distance matrix must be square");
}

// Union-find over the epsilon graph.
std::vector<std::size_t> component_labels(const DistanceMatrix& D, double epsilon) {
  const auto n = static_cast<std::size_t>(D.rows());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < epsilon) {
        const auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = find(i);
  return label;
}

std::vector<std::vector<std::size_t>> group_components(const std::vector<std::size_t>& label) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(label.size(), static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < label.size(); ++v) {
    auto& s = slot[label[v]];
    if (s == static_cast<std::size_t>(-1)) {
      s = groups.size();
      groups.emplace_back();
    }
    groups[s].push_back(v);
  }
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return groups;
}

} // namespace

DistanceMatrix pairwise_l2(std::span<const GridFunction> curves) {
  const auto n = static_cast<Eigen::Index>(curves.size());
  DistanceMatrix D = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = l2_distance(curves[static_cast<std::size_t>(i)], curves[static_cast<std::size_t>(j)]);
      D(i, j) = d;
      D(j, i) = d;
    }
  return D;
}

DistanceMatrix pairwise_score_distance(const Eigen::MatrixXd& scores, std::size_t K) {
  if (K > static_cast<std::size_t>(scores.cols())) throw InvalidArgumentError("not enough score columns");
  const auto n = scores.rows();
  const auto k = static_cast<Eigen::Index>(K);
  DistanceMatrix D = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (scores.row(i).head(k) - scores.row(j).head(k)).norm();
      D(i, j) = d;
      D(j, i) = d;
    }
  return D;
}

std::vector<int> local_density(const DistanceMatrix& D, double epsilon) {
  require_square(D);
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
  const auto n = D.rows();
  std::vector<int> rho(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && D(i, j) < epsilon) ++rho[static_cast<std::size_t>(i)];
  return rho;
}

double density_penalty(int rho, double delta) {
  if (!(static_cast<double>(rho) < delta)) return 0.0;
  if (rho <= 0) return kPenaltyCap;
  return 1.0 / (static_cast<double>(rho) * static_cast<double>(rho));
}

NeighborhoodGraph build_graph(const DistanceMatrix& D, double epsilon, double delta) {
  require_square(D);
  if (!(delta >= 0.0)) throw InvalidArgumentError("delta must be nonnegative");
  NeighborhoodGraph g;
  g.n = static_cast<std::size_t>(D.rows());
  g.epsilon = epsilon;
  g.delta = delta;
  g.density = local_density(D, epsilon);
  g.offsets.assign(g.n + 1, 0);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      const double d = D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i == j || !(d < epsilon)) continue;
      const int rho = std::min(g.density[i], g.density[j]);
      const double p = density_penalty(rho, delta);
      g.edges.push_back({i, j, d, p, d * (1.0 + p)});
    }
    g.offsets[i + 1] = g.edges.size();
  }
  return g;
}

GeodesicResult all_pairs_geodesic(const NeighborhoodGraph& graph) {
  const std::size_t n = graph.n;
  const auto N = static_cast<Eigen::Index>(n);
  GeodesicResult r;
  r.distances = DistanceMatrix::Constant(N, N, kInf);
  r.penalized = DistanceMatrix::Constant(N, N, kInf);

  using Item = std::pair<double, std::size_t>;
  parallel_for(n, [&](std::size_t src) {
    std::vector<double> best(n, kInf), length(n, kInf);
    std::vector<char> done(n, 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    best[src] = 0.0;
    length[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (const Edge& e : graph.out_edges(u)) {
        const double cand = d + e.weight;
        if (cand < best[e.to]) {
          best[e.to] = cand;
          length[e.to] = length[u] + e.l2;
          heap.emplace(cand, e.to);
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      r.penalized(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(v)) = best[v];
      r.distances(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(v)) = length[v];
    }
  });
  // Equal-weight alternative paths can have different L2 lengths; the lower-index
  // source decides so the matrices are exactly symmetric.
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i + 1; j < N; ++j) {
      r.penalized(j, i) = r.penalized(i, j);
      r.distances(j, i) = r.distances(i, j);
    }

  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::isfinite(r.penalized(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))) {
        label[i] = label[j];
        break;
      }
  r.component_of = label;
  r.components = group_components(label);
  // renumber component_of to match the ordering of `components`
  for (std::size_t c = 0; c < r.components.size(); ++c)
    for (std::size_t v : r.components[c]) r.component_of[v] = c;
  return r;
}

std::vector<std::size_t> component_sizes(const DistanceMatrix& D, double epsilon) {
  require_square(D);
  const auto groups = group_components(component_labels(D, epsilon));
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) sizes.push_back(g.size());
  return sizes;
}

std::vector<double> min_epsilon_for_connectivity(const DistanceMatrix& D, std::span<const double> candidates,
                                                 double max_disconnected_fraction) {
  require_square(D);
  const double n = static_cast<double>(D.rows());
  std::vector<double> kept;
  std::vector<std::vector<std::size_t>> rejected;
  for (double eps : candidates) {
    if (!(eps > 0.0)) throw InvalidArgumentError("epsilon candidates must be positive");
    const auto sizes = component_sizes(D, eps);
    if (static_cast<double>(sizes.front()) >= (1.0 - max_disconnected_fraction) * n - 1e-9)
      kept.push_back(eps);
    else
      rejected.push_back(sizes);
  }
  if (kept.empty()) {
    std::string msg = "no epsilon candidate connects enough vertices; largest components:";
    for (const auto& s : rejected) msg += " " + std::to_string(s.front()) + "/" + std::to_string(D.rows());
    throw NoValidEpsilonError(msg, rejected);
  }
  return kept;
}

double connectivity_lower_bound(const DistanceMatrix& D, double max_disconnected_fraction) {
  require_square(D);
  const auto n = static_cast<std::size_t>(D.rows());
  const double target = (1.0 - max_disconnected_fraction) * static_cast<double>(n) - 1e-9;
  if (target <= 1.0) return std::numeric_limits<double>::min();
  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), i, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<std::size_t> parent(n), size(n, 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t largest = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto a = find(pairs[k].i), b = find(pairs[k].j);
    if (a != b) {
      if (size[a] < size[b]) std::swap(a, b);
      parent[b] = a;
      size[a] += size[b];
      largest = std::max(largest, size[a]);
    }
    // only test once every pair at this distance has been merged
    if ((k + 1 == pairs.size() || pairs[k + 1].d > pairs[k].d) && static_cast<double>(largest) >= target)
      return std::nextafter(std::max(pairs[k].d, 0.0), std::numeric_limits<double>::infinity());
  }
  return std::nextafter(pairs.back().d, std::numeric_limits<double>::infinity());
}

std::vector<double> knn_epsilon_candidates(const DistanceMatrix& D, std::span<const int> ks) {
  require_square(D);
  const auto n = static_cast<std::size_t>(D.rows());
  std::vector<std::vector<double>> sorted_rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = sorted_rows[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back(D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    std::sort(row.begin(), row.end());
  }
  std::vector<double> out;
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) >= n) throw InvalidArgumentError("nearest-neighbor rank out of range");
    std::vector<double> kth;
    for (const auto& row : sorted_rows) kth.push_back(row[static_cast<std::size_t>(k - 1)]);
    std::sort(kth.begin(), kth.end());
    const std::size_t m = kth.size();
    out.push_back(m % 2 == 1 ? kth[m / 2] : 0.5 * (kth[m / 2 - 1] + kth[m / 2]));
  }
  return out;
}

double delta_for_fraction(std::span<const int> density, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw InvalidArgumentError("penalized fraction must lie in [0, 1)");
  if (fraction == 0.0 || density.empty()) return 0.0;
  std::vector<int> sorted(density.begin(), density.end());
  std::sort(sorted.begin(), sorted.end());
  auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size()) - 1e-9));
  count = std::clamp<std::size_t>(count, 1, sorted.size());
  return static_cast<double>(sorted[count - 1]) + 1.0;
}

void write_edge_csv(std::ostream& out, const NeighborhoodGraph& graph) {
  out << "i,j,l2_distance,penalty,weight\n";
  const auto old = out.precision(17);
  for (const Edge& e : graph.edges)
    out << e.from << ',' << e.to << ',' << e.l2 << ',' << e.penalty << ',' << e.weight << '\n';
  out.precision(old);
}

} // namespace fmca
