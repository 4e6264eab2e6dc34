#include "fmca/smoothing.hpp"

#include "fmca/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fmca {

std::string_view kernel_name(Kernel k) {
  return k == Kernel::Gaussian ? "gaussian" : "epanechnikov";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "gaussian") return Kernel::Gaussian;
  if (name == "epanechnikov") return Kernel::Epanechnikov;
  throw InvalidArgumentError("unknown kernel '" + std::string(name) + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Observations sharing a location collapse into one weighted point: the local
// least-squares solution only depends on multiplicity and location mean.
struct Point1 {
  double t;
  double m;
  double ybar;
  double ss; // within-location sum of squares about ybar
};

struct Point2 {
  double t;
  double s;
  double m;
  double ybar;
  double ss;
};

std::vector<Point1> aggregate(std::span<const Observation> obs) {
  std::vector<Observation> sorted(obs.begin(), obs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  std::vector<Point1> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && sorted[j].t == sorted[i].t) sum += sorted[j++].y;
    const double m = static_cast<double>(j - i);
    const double mean = sum / m;
    double ss = 0.0;
    for (std::size_t k = i; k < j; ++k) ss += (sorted[k].y - mean) * (sorted[k].y - mean);
    out.push_back({sorted[i].t, m, mean, ss});
    i = j;
  }
  return out;
}

std::vector<Point2> aggregate(std::span<const Observation2> obs) {
  std::vector<Observation2> sorted(obs.begin(), obs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.t < b.t || (a.t == b.t && a.s < b.s);
  });
  std::vector<Point2> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && sorted[j].t == sorted[i].t && sorted[j].s == sorted[i].s) sum += sorted[j++].y;
    const double m = static_cast<double>(j - i);
    const double mean = sum / m;
    double ss = 0.0;
    for (std::size_t k = i; k < j; ++k) ss += (sorted[k].y - mean) * (sorted[k].y - mean);
    out.push_back({sorted[i].t, sorted[i].s, m, mean, ss});
    i = j;
  }
  return out;
}

template <class P>
std::pair<std::size_t, std::size_t> window(const std::vector<P>& pts, double x0, double reach) {
  if (!std::isfinite(reach)) return {0, pts.size()};
  auto lo = std::lower_bound(pts.begin(), pts.end(), x0 - reach, [](const P& p, double v) { return p.t < v; });
  auto hi = std::upper_bound(pts.begin(), pts.end(), x0 + reach, [](double v, const P& p) { return v < p.t; });
  return {static_cast<std::size_t>(lo - pts.begin()), static_cast<std::size_t>(hi - pts.begin())};
}

struct LocalFit {
  double value = 0.0;
  double self_weight = 0.0; // hat weight of the point at index `self` (if any)
  bool empty = true;
};

LocalFit fit_1d(const std::vector<Point1>& pts, double x0, double h, Kernel kernel,
                std::size_t self = static_cast<std::size_t>(-1)) {
  const auto [lo, hi] = window(pts, x0, h * kernel_radius(kernel));
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0, wself = 0;
  for (std::size_t k = lo; k < hi; ++k) {
    const double d = pts[k].t - x0;
    const double w = pts[k].m * kernel_value(kernel, d / h);
    if (w == 0.0) continue;
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
    t0 += w * pts[k].ybar;
    t1 += w * d * pts[k].ybar;
    if (k == self) wself = w;
  }
  LocalFit fit;
  if (s0 <= 0.0) return fit;
  fit.empty = false;
  const double det = s0 * s2 - s1 * s1;
  if (det <= 1e-10 * s0 * s2 || s2 <= 0.0) {
    fit.value = t0 / s0;
    fit.self_weight = wself / s0;
  } else {
    fit.value = (s2 * t0 - s1 * t1) / det;
    // self point sits at d = 0 when evaluated at its own location
    fit.self_weight = wself * s2 / det;
  }
  return fit;
}

LocalFit fit_2d(const std::vector<Point2>& pts, double x0, double y0, double h, Kernel kernel,
                std::size_t self = static_cast<std::size_t>(-1)) {
  const double reach = h * kernel_radius(kernel);
  const auto [lo, hi] = window(pts, x0, reach);
  // moments of (1, dt, ds)
  double m00 = 0, m01 = 0, m02 = 0, m11 = 0, m12 = 0, m22 = 0;
  double r0 = 0, r1 = 0, r2 = 0, wself = 0;
  for (std::size_t k = lo; k < hi; ++k) {
    const double ds = pts[k].s - y0;
    if (std::abs(ds) > reach) continue;
    const double dt = pts[k].t - x0;
    const double w = pts[k].m * kernel_value(kernel, dt / h) * kernel_value(kernel, ds / h);
    if (w == 0.0) continue;
    m00 += w;
    m01 += w * dt;
    m02 += w * ds;
    m11 += w * dt * dt;
    m12 += w * dt * ds;
    m22 += w * ds * ds;
    r0 += w * pts[k].ybar;
    r1 += w * dt * pts[k].ybar;
    r2 += w * ds * pts[k].ybar;
    if (k == self) wself = w;
  }
  LocalFit fit;
  if (m00 <= 0.0) return fit;
  fit.empty = false;
  // first row of the inverse via cofactors
  const double c00 = m11 * m22 - m12 * m12;
  const double c01 = -(m01 * m22 - m12 * m02);
  const double c02 = m01 * m12 - m11 * m02;
  const double det = m00 * c00 + m01 * c01 + m02 * c02;
  if (!(det > 1e-10 * m00 * m11 * m22) || m11 <= 0.0 || m22 <= 0.0) {
    fit.value = r0 / m00;
    fit.self_weight = wself / m00;
  } else {
    fit.value = (c00 * r0 + c01 * r1 + c02 * r2) / det;
    fit.self_weight = wself * c00 / det;
  }
  return fit;
}

void require_positive_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgumentError("bandwidth must be positive and finite");
}

} // namespace

GridFunction nadaraya_watson_smooth(const CurveSample& sample, GridPtr grid, double h1, Kernel kernel) {
  require_positive_bandwidth(h1);
  sample.validate();
  std::vector<double> out(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g) {
    const double t = (*grid)[g];
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < sample.size(); ++j) {
      const double w = kernel_value(kernel, (sample.times[j] - t) / h1);
      num += w * sample.values[j];
      den += w;
    }
    if (!(den > 0.0)) throw BandwidthTooSmallError(t, h1);
    out[g] = num / den;
  }
  return GridFunction(std::move(grid), std::move(out));
}

GridFunction local_linear_smooth_1d(std::span<const Observation> pooled, GridPtr grid, double h,
                                    Kernel kernel) {
  require_positive_bandwidth(h);
  if (pooled.empty()) throw InsufficientDataError("no pooled observations to smooth");
  const auto pts = aggregate(pooled);
  std::vector<double> out(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g) {
    const auto fit = fit_1d(pts, (*grid)[g], h, kernel);
    if (fit.empty) throw BandwidthTooSmallError((*grid)[g], h);
    out[g] = fit.value;
  }
  return GridFunction(std::move(grid), std::move(out));
}

Surface local_linear_smooth_2d(std::span<const Observation2> pooled, const Grid& grid, double h,
                               Kernel kernel) {
  require_positive_bandwidth(h);
  if (pooled.empty()) throw InsufficientDataError("no pooled observations to smooth");
  const auto pts = aggregate(pooled);
  const std::size_t n = grid.size();
  Surface s(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto fit = fit_2d(pts, grid[a], grid[b], h, kernel);
      if (fit.empty) throw BandwidthTooSmallError(grid[a], h);
      s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = fit.value;
    }
  }
  Surface sym = 0.5 * (s + s.transpose());
  return sym;
}

std::vector<double> bandwidth_candidates(const Grid& grid, std::size_t count) {
  const double lo = 2.0 * grid.length() / static_cast<double>(grid.size() - 1);
  const double hi = grid.length() / 4.0;
  std::vector<double> out;
  if (count == 1 || !(hi > lo)) return {std::max(lo, hi)};
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(count - 1));
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo * std::pow(ratio, static_cast<double>(i)));
  out.back() = hi;
  return out;
}

namespace {

double gcv_value(double rss, double trace, double total) {
  const double frac = trace / total;
  if (!(frac < 1.0 - 1e-9)) return kInf;
  return (rss / total) / ((1.0 - frac) * (1.0 - frac));
}

template <class Score>
double select_by_gcv(std::span<const double> candidates, Score score) {
  double best = kInf, best_h = 0.0;
  for (double h : candidates) {
    const double v = score(h);
    if (v < best) {
      best = v;
      best_h = h;
    }
  }
  if (!std::isfinite(best))
    throw BandwidthTooSmallError(std::numeric_limits<double>::quiet_NaN(),
                                 candidates.empty() ? 0.0 : candidates.back());
  return best_h;
}

} // namespace

double gcv_score_1d(std::span<const Observation> pooled, const Grid& grid, double h, Kernel kernel) {
  require_positive_bandwidth(h);
  const auto pts = aggregate(pooled);
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (fit_1d(pts, grid[g], h, kernel).empty) return kInf;
  double rss = 0.0, trace = 0.0, total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto fit = fit_1d(pts, pts[k].t, h, kernel, k);
    const double r = pts[k].ybar - fit.value;
    rss += pts[k].ss + pts[k].m * r * r;
    trace += fit.self_weight;
    total += pts[k].m;
  }
  return gcv_value(rss, trace, total);
}

double gcv_score_2d(std::span<const Observation2> pooled, const Grid& grid, double h, Kernel kernel) {
  require_positive_bandwidth(h);
  const auto pts = aggregate(pooled);
  for (std::size_t a = 0; a < grid.size(); ++a)
    for (std::size_t b = 0; b < grid.size(); ++b)
      if (fit_2d(pts, grid[a], grid[b], h, kernel).empty) return kInf;
  double rss = 0.0, trace = 0.0, total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto fit = fit_2d(pts, pts[k].t, pts[k].s, h, kernel, k);
    const double r = pts[k].ybar - fit.value;
    rss += pts[k].ss + pts[k].m * r * r;
    trace += fit.self_weight;
    total += pts[k].m;
  }
  return gcv_value(rss, trace, total);
}

double gcv_score_nw(std::span<const CurveSample> samples, const Grid& grid, double h, Kernel kernel) {
  require_positive_bandwidth(h);
  double rss = 0.0, trace = 0.0, total = 0.0;
  for (const auto& smp : samples) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double den = 0.0;
      for (double t : smp.times) den += kernel_value(kernel, (t - grid[g]) / h);
      if (!(den > 0.0)) return kInf;
    }
    for (std::size_t j = 0; j < smp.size(); ++j) {
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < smp.size(); ++k) {
        const double w = kernel_value(kernel, (smp.times[k] - smp.times[j]) / h);
        num += w * smp.values[k];
        den += w;
      }
      const double r = smp.values[j] - num / den;
      rss += r * r;
      trace += kernel_value(kernel, 0.0) / den;
      total += 1.0;
    }
  }
  return gcv_value(rss, trace, total);
}

double select_bandwidth_1d(std::span<const Observation> pooled, const Grid& grid, Kernel kernel,
                           std::span<const double> candidates) {
  return select_by_gcv(candidates, [&](double h) { return gcv_score_1d(pooled, grid, h, kernel); });
}

double select_bandwidth_2d(std::span<const Observation2> pooled, const Grid& grid, Kernel kernel,
                           std::span<const double> candidates) {
  return select_by_gcv(candidates, [&](double h) { return gcv_score_2d(pooled, grid, h, kernel); });
}

double select_bandwidth_nw(std::span<const CurveSample> samples, const Grid& grid, Kernel kernel,
                           std::span<const double> candidates) {
  return select_by_gcv(candidates, [&](double h) { return gcv_score_nw(samples, grid, h, kernel); });
}

} // namespace fmca
