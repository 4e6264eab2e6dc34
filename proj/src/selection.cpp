#include "fmca/selection.hpp"

#include "fmca/error.hpp"
#include "fmca/parallel.hpp"
#include "fmca/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace fmca {

Embedding Geometry::embed(std::size_t d) const {
  Embedding e = spectrum->embed(d);
  e.source_indices = retained;
  return e;
}

Geometry compute_geometry(const DistanceMatrix& D, double epsilon, double delta_fraction, GeodesicLength length) {
  Geometry g;
  g.epsilon = epsilon;
  g.delta_fraction = delta_fraction;
  g.delta = delta_for_fraction(local_density(D, epsilon), delta_fraction);
  g.geodesic = all_pairs_geodesic(build_graph(D, epsilon, g.delta));
  g.retained = g.geodesic.largest_component();
  const auto m = static_cast<Eigen::Index>(g.retained.size());
  const auto& full = g.geodesic.lengths(length);
  g.distances.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      g.distances(a, b) = full(static_cast<Eigen::Index>(g.retained[static_cast<std::size_t>(a)]),
                               static_cast<Eigen::Index>(g.retained[static_cast<std::size_t>(b)]));
  g.spectrum.emplace(g.distances);
  return g;
}

std::vector<std::vector<std::size_t>> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgumentError("cross-validation needs at least two folds");
  folds = std::min(folds, n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t p = 0; p < n; ++p) out[p % folds].push_back(order[p]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

std::vector<double> embedding_bandwidths(const Eigen::MatrixXd& coordinates, std::size_t count) {
  const auto n = coordinates.rows();
  if (n < 2) return {1.0};
  const DistanceMatrix E = embedding_distances(coordinates);
  std::vector<double> nn;
  double diameter = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      best = std::min(best, E(i, j));
      diameter = std::max(diameter, E(i, j));
    }
    nn.push_back(best);
  }
  std::sort(nn.begin(), nn.end());
  const std::size_t m = nn.size();
  double lo = m % 2 == 1 ? nn[m / 2] : 0.5 * (nn[m / 2 - 1] + nn[m / 2]);
  const double hi = 0.5 * diameter;
  if (!(lo > 0.0)) lo = hi / 100.0;
  if (!(hi > lo) || count < 2) return {hi > 0.0 ? hi : 1.0};
  std::vector<double> out(count);
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(count - 1));
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::pow(ratio, static_cast<double>(i));
  out.back() = hi;
  return out;
}

CvReport cross_validate(std::span<const CurveSample> samples, std::span<const GridFunction> curves,
                        const DistanceMatrix& D, const CvConfig& config) {
  if (samples.size() != curves.size() || D.rows() != static_cast<Eigen::Index>(curves.size()))
    throw InvalidArgumentError("samples, curves and distances must describe the same subjects");
  if (config.epsilon_candidates.empty() || config.delta_fractions.empty())
    throw InvalidArgumentError("empty candidate grid");
  if (config.dim < 1) throw InvalidArgumentError("embedding dimension must be positive");

  CvReport report;
  std::string diagnostics;
  for (double eps : config.epsilon_candidates) {
    std::vector<double> seen_deltas;
    for (double frac : config.delta_fractions) {
      Geometry geo = compute_geometry(D, eps, frac, config.length);
      if (std::find(seen_deltas.begin(), seen_deltas.end(), geo.delta) != seen_deltas.end()) continue;
      seen_deltas.push_back(geo.delta);
      const std::size_t m = geo.retained.size();
      if (m < 3 || config.dim > m - 1) {
        diagnostics += " eps=" + std::to_string(eps) + ": component of " + std::to_string(m) + " too small;";
        continue;
      }
      const Embedding emb = geo.embed(config.dim);
      const auto folds = assign_folds(m, config.folds, config.seed);
      std::vector<GridFunction> sub_curves;
      double total_points = 0.0;
      for (std::size_t r : geo.retained) {
        sub_curves.push_back(curves[r]);
        total_points += static_cast<double>(samples[r].size());
      }
      const auto hs = config.h_candidates.empty() ? embedding_bandwidths(emb.coordinates, config.h_count)
                                                  : config.h_candidates;
      std::vector<CvRow> rows(hs.size());
      parallel_for(hs.size(), [&](std::size_t k) {
        const double h = hs[k];
        CvRow row{eps, frac, geo.delta, h, 0.0, {}, m};
        bool feasible = true;
        for (const auto& fold : folds) {
          std::vector<char> include(m, 1);
          for (std::size_t a : fold) include[a] = 0;
          double sspe = 0.0;
          for (std::size_t a : fold) {
            const Eigen::VectorXd theta = emb.coordinates.row(static_cast<Eigen::Index>(a)).transpose();
            try {
              const auto pred = kernel_average(emb.coordinates, sub_curves, theta, h, include, config.max_doublings);
              const auto& smp = samples[geo.retained[a]];
              for (std::size_t l = 0; l < smp.size(); ++l) {
                const double r = pred.at(smp.times[l]) - smp.values[l];
                sspe += r * r;
              }
            } catch (const EmptyNeighborhoodError&) {
              feasible = false;
            }
          }
          row.fold_sspe.push_back(feasible ? sspe : std::numeric_limits<double>::infinity());
          if (!feasible) break;
        }
        if (feasible) {
          double sum = 0.0;
          for (double s : row.fold_sspe) sum += s;
          row.mspe = sum / total_points;
        } else {
          row.mspe = std::numeric_limits<double>::infinity();
        }
        rows[k] = std::move(row);
      });
      for (auto& row : rows) report.table.push_back(std::move(row));
    }
  }
  bool any = false;
  for (std::size_t r = 0; r < report.table.size(); ++r) {
    if (!std::isfinite(report.table[r].mspe)) continue;
    if (!any || report.table[r].mspe < report.table[report.best].mspe) report.best = r;
    any = true;
  }
  if (!any)
    throw CvInfeasibleError("no (epsilon, delta, h) candidate produced predictions for every fold;" + diagnostics +
                            " " + std::to_string(report.table.size()) + " triples had empty neighborhoods");
  return report;
}

CvReport cross_validate(std::span<const CurveSample> samples, std::span<const GridFunction> curves,
                        const CvConfig& config) {
  return cross_validate(samples, curves, pairwise_l2(curves), config);
}

double mspe(std::span<const GridFunction> truth, std::span<const GridFunction> predictions) {
  if (truth.size() != predictions.size() || truth.empty())
    throw InvalidArgumentError("truth and predictions must be nonempty and of equal length");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = l2_distance(truth[i], predictions[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(truth.size());
}

double rspe(std::span<const GridFunction> truth, std::span<const GridFunction> predictions) {
  if (truth.size() != predictions.size() || truth.empty())
    throw InvalidArgumentError("truth and predictions must be nonempty and of equal length");
  const GridFunction avg = cross_sectional_mean(truth);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double a = l2_distance(truth[i], predictions[i]);
    const double b = l2_distance(truth[i], avg);
    num += a * a;
    den += b * b;
  }
  if (!(den > 0.0)) throw DegenerateError("all true curves coincide; relative error undefined");
  return num / den;
}

void write_cv_csv(std::ostream& out, const CvReport& report) {
  const auto old = out.precision(17);
  out << "epsilon,delta_fraction,delta,h,retained,mspe,best\n";
  for (std::size_t r = 0; r < report.table.size(); ++r) {
    const auto& row = report.table[r];
    out << row.epsilon << ',' << row.delta_fraction << ',' << row.delta << ',' << row.h << ',' << row.retained
        << ',' << row.mspe << ',' << (r == report.best ? 1 : 0) << '\n';
  }
  out.precision(old);
}

} // namespace fmca
