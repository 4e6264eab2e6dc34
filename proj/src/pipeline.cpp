#include "fmca/pipeline.hpp"

#include "fmca/error.hpp"

#include <algorithm>
#include <limits>

namespace fmca {

std::string_view curve_source_name(CurveSource s) { return s == CurveSource::Presmooth ? "presmooth" : "kl"; }

CurveSource parse_curve_source(std::string_view name) {
  if (name == "kl") return CurveSource::KarhunenLoeve;
  if (name == "presmooth") return CurveSource::Presmooth;
  throw InvalidArgumentError("unknown curve source '" + std::string(name) + "'");
}

std::string_view geodesic_length_name(GeodesicLength g) {
  return g == GeodesicLength::Penalized ? "penalized" : "unpenalized";
}

GeodesicLength parse_geodesic_length(std::string_view name) {
  if (name == "unpenalized") return GeodesicLength::Unpenalized;
  if (name == "penalized") return GeodesicLength::Penalized;
  throw InvalidArgumentError("unknown geodesic length '" + std::string(name) + "'");
}

Preliminary preliminary_fit(std::span<const CurveSample> samples, const FitOptions& options) {
  Preliminary p;
  p.grid = working_grid(samples, options.grid_size);
  p.fpca = fit_fpca(samples, p.grid, options.fpca);
  if (options.curve_source == CurveSource::KarhunenLoeve) {
    for (std::size_t i = 0; i < samples.size(); ++i) p.curves.push_back(p.fpca.fitted_curve(i, p.fpca.K));
    p.l2 = pairwise_score_distance(p.fpca.scores, p.fpca.K);
  } else {
    p.h_presmooth = options.h_presmooth;
    if (!(p.h_presmooth > 0.0)) {
      const auto cands = bandwidth_candidates(*p.grid, options.fpca.bandwidth_candidates);
      p.h_presmooth = select_bandwidth_nw(samples, *p.grid, options.fpca.kernel, cands);
    }
    for (const auto& s : samples) p.curves.push_back(nadaraya_watson_smooth(s, p.grid, p.h_presmooth, options.fpca.kernel));
    p.l2 = pairwise_l2(p.curves);
  }
  return p;
}

std::vector<double> epsilon_candidates(const DistanceMatrix& D, const FitOptions& options) {
  std::vector<double> raw = options.epsilon_values;
  if (raw.empty()) {
    std::vector<int> ks;
    for (int k : options.epsilon_knn)
      if (k >= 1 && static_cast<Eigen::Index>(k) < D.rows()) ks.push_back(k);
    if (ks.empty()) ks.push_back(static_cast<int>(D.rows()) - 1);
    raw = knn_epsilon_candidates(D, ks);
  }
  // Candidates below the connectivity bound are raised to it rather than dropped.
  const double floor = connectivity_lower_bound(D, options.max_disconnected_fraction);
  for (double& e : raw) e = std::max(e, floor);
  std::vector<double> unique;
  for (double e : raw)
    if (std::find(unique.begin(), unique.end(), e) == unique.end()) unique.push_back(e);
  return min_epsilon_for_connectivity(D, unique, options.max_disconnected_fraction);
}

CvConfig cv_config(const FitOptions& options, std::vector<double> epsilons, std::size_t dim) {
  CvConfig c;
  c.epsilon_candidates = std::move(epsilons);
  c.delta_fractions = options.delta_fractions;
  c.h_count = options.h_count;
  c.folds = options.folds;
  c.seed = options.seed;
  c.dim = dim;
  c.length = options.length;
  c.max_doublings = options.max_doublings;
  return c;
}

DimensionFit fit_dimension(std::span<const CurveSample> samples, std::span<const GridFunction> curves,
                           const DistanceMatrix& D, CvConfig config) {
  DimensionFit fit;
  fit.d = config.dim;
  fit.cv = cross_validate(samples, curves, D, config);
  const CvRow& best = fit.cv.best_row();
  fit.epsilon = best.epsilon;
  fit.delta_fraction = best.delta_fraction;
  fit.delta = best.delta;
  const Geometry geo = compute_geometry(D, best.epsilon, best.delta_fraction, config.length);
  fit.retained = geo.retained;
  Embedding emb = geo.embed(config.dim);
  fit.fde = fde(geo.distances, emb);
  std::vector<GridFunction> sub;
  for (std::size_t r : geo.retained) sub.push_back(curves[r]);
  fit.model = ManifoldModel::build(std::move(emb), std::move(sub), best.h);
  return fit;
}

FitResult fit_manifold(std::span<const CurveSample> samples, const FitOptions& options) {
  FitResult result;
  result.prelim = preliminary_fit(samples, options);
  for (const auto& s : samples) result.subject_ids.push_back(s.subject_id);
  result.epsilon_candidates = epsilon_candidates(result.prelim.l2, options);
  const auto& curves = result.prelim.curves;
  const auto& D = result.prelim.l2;

  if (options.dim > 0) {
    result.chosen = fit_dimension(samples, curves, D, cv_config(options, result.epsilon_candidates, options.dim));
    result.fde_by_dim.assign(options.dim, std::numeric_limits<double>::quiet_NaN());
    result.fde_by_dim.back() = result.chosen.fde;
  } else {
    result.dim_converged = false;
    const std::size_t limit = std::max<std::size_t>(1, std::min(options.d_max, samples.size() > 2 ? samples.size() - 2 : 1));
    for (std::size_t d = 1; d <= limit; ++d) {
      auto fit = fit_dimension(samples, curves, D, cv_config(options, result.epsilon_candidates, d));
      result.fde_by_dim.push_back(fit.fde);
      const bool done = 1.0 - fit.fde < options.beta;
      result.chosen = std::move(fit);
      if (done) {
        result.dim_converged = true;
        break;
      }
    }
  }
  std::vector<char> kept(samples.size(), 0);
  for (std::size_t r : result.chosen.retained) kept[r] = 1;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!kept[i]) result.excluded.push_back(i);
  return result;
}

} // namespace fmca
