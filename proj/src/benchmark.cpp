#include "fmca/error.hpp"
#include "fmca/simulate.hpp"

#include <cmath>
#include <limits>

namespace fmca {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Leave-one-out FPCA predictions: mean and eigenfunctions refitted without
// subject i (bandwidths held at the full-data choice), scores of i from its own data.
std::vector<std::vector<GridFunction>> fpca_loo(std::span<const CurveSample> samples, const GridPtr& grid,
                                                const FpcaModel& full, const FpcaOptions& base, std::size_t max_l) {
  FpcaOptions opts = base;
  opts.h_mean = full.h_mean;
  opts.h_cov = full.h_cov;
  opts.max_components = std::max(opts.max_components, max_l);
  std::vector<std::vector<GridFunction>> out(max_l);
  std::vector<CurveSample> others;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < samples.size(); ++j)
      if (j != i) others.push_back(samples[j]);
    const FpcaModel m = fit_fpca(others, grid, opts);
    const auto xi = m.score_method == ScoreMethod::Conditional ? scores_conditional(samples[i], m)
                                                                 : scores_integration(samples[i], m.mean, m.eigenfunctions);
    for (std::size_t l = 1; l <= max_l; ++l)
      out[l - 1].push_back(reconstruct(m.mean, m.eigenfunctions, xi, std::min(l, m.components())));
  }
  return out;
}

struct LooScore {
  double mspe = kNaN;
  double rspe = kNaN;
};

LooScore manifold_loo(const DimensionFit& fit, std::span<const GridFunction> truth, int max_doublings) {
  const auto preds = predict_all_loo(fit.model, max_doublings);
  std::vector<GridFunction> t;
  for (std::size_t r : fit.retained) t.push_back(truth[r]);
  return {mspe(t, preds), rspe(t, preds)};
}

} // namespace

BenchmarkResult run_benchmark(const SimSpec& spec, const BenchmarkOptions& options) {
  BenchmarkResult res;
  res.spec = spec;
  res.intrinsic_dim = intrinsic_dimension(spec.manifold);
  const SimOutput sim = simulate(spec);
  const std::size_t max_dim = options.max_dim;

  FitOptions fit = options.fit;
  fit.grid_size = spec.grid_size;
  fit.seed = spec.seed;
  fit.fpca.max_components = std::max(fit.fpca.max_components, max_dim);
  const Preliminary prelim = preliminary_fit(sim.samples, fit);

  // Every table cell exists; cells that cannot be computed (tiny samples,
  // disconnected graphs) stay NaN.
  if (options.fpca) {
    res.mspe_fpca.assign(max_dim, kNaN);
    res.rspe_fpca.assign(max_dim, kNaN);
    try {
      const auto loo = fpca_loo(sim.samples, prelim.grid, prelim.fpca, fit.fpca, max_dim);
      for (std::size_t l = 0; l < max_dim; ++l) {
        res.mspe_fpca[l] = mspe(sim.truth, loo[l]);
        res.rspe_fpca[l] = rspe(sim.truth, loo[l]);
      }
    } catch (const Error&) {
    }
  }
  if (options.manifold) {
    res.fde.assign(max_dim, kNaN);
    res.mspe_manifold.assign(max_dim, kNaN);
    res.rspe_manifold.assign(max_dim, kNaN);
    res.delta_fraction.assign(max_dim, kNaN);
  }
  res.mspe_isomap = kNaN;
  res.isomap_ratio = kNaN;

  const auto& D = prelim.l2;
  std::vector<double> eps;
  try {
    eps = epsilon_candidates(D, fit);
  } catch (const Error&) {
  }

  if (options.manifold && !eps.empty()) {
    for (std::size_t d = 1; d <= max_dim; ++d) {
      try {
        const auto f = fit_dimension(sim.samples, prelim.curves, D, cv_config(fit, eps, d));
        const auto score = manifold_loo(f, sim.truth, fit.max_doublings);
        res.fde[d - 1] = f.fde;
        res.mspe_manifold[d - 1] = score.mspe;
        res.rspe_manifold[d - 1] = score.rspe;
        res.delta_fraction[d - 1] = f.delta_fraction;
      } catch (const Error&) {
      }
    }
  }

  if (options.isomap && options.manifold && !eps.empty() && res.intrinsic_dim <= max_dim) {
    auto cfg = cv_config(fit, eps, res.intrinsic_dim);
    cfg.delta_fractions = {0.0};
    try {
      const auto f = fit_dimension(sim.samples, prelim.curves, D, cfg);
      res.mspe_isomap = manifold_loo(f, sim.truth, fit.max_doublings).mspe;
      res.isomap_ratio = res.mspe_manifold[res.intrinsic_dim - 1] / res.mspe_isomap;
    } catch (const Error&) {
    }
  }

  for (int k : options.knn_presets) {
    double value = kNaN;
    std::size_t retained = 0;
    try {
      // The sensitivity table studies the raw step size: no connectivity floor,
      // errors are measured on the largest component.
      const int kk[] = {k};
      const auto e = knn_epsilon_candidates(D, kk);
      const auto f = fit_dimension(sim.samples, prelim.curves, D, cv_config(fit, e, res.intrinsic_dim));
      value = manifold_loo(f, sim.truth, fit.max_doublings).mspe;
      retained = f.retained.size();
    } catch (const Error&) {
    }
    res.mspe_by_knn.push_back(value);
    res.retained_by_knn.push_back(retained);
  }
  return res;
}

} // namespace fmca
