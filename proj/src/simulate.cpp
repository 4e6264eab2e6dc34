#include "fmca/simulate.hpp"

#include "fmca/error.hpp"
#include "fmca/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fmca {

std::string_view manifold_name(ManifoldId m) {
  switch (m) {
  case ManifoldId::M1: return "M1";
  case ManifoldId::M2: return "M2";
  case ManifoldId::M3: return "M3";
  }
  return "M1";
}

ManifoldId parse_manifold(std::string_view name) {
  if (name == "M1" || name == "m1" || name == "1") return ManifoldId::M1;
  if (name == "M2" || name == "m2" || name == "2") return ManifoldId::M2;
  if (name == "M3" || name == "m3" || name == "3") return ManifoldId::M3;
  throw InvalidArgumentError("unknown manifold '" + std::string(name) + "' (expected M1, M2 or M3)");
}

std::size_t intrinsic_dimension(ManifoldId m) { return m == ManifoldId::M1 ? 1 : 2; }

void SimSpec::validate() const {
  if (n < 2) throw InvalidArgumentError("simulation needs n >= 2");
  if (points_per_curve < 2) throw InvalidArgumentError("simulation needs at least two points per curve");
  if (!(noise_ratio >= 0.0)) throw InvalidArgumentError("noise ratio must be nonnegative");
  if (grid_size < 2 || !(upper > lower)) throw InvalidArgumentError("invalid working grid");
}

double m1_warp(double alpha, double t) {
  const double x = std::clamp(t / 8.0 + 0.5, 0.0, 1.0);
  // int_0^x s^a (1 - s) ds / int_0^1 s^a (1 - s) ds = (a + 2) x^(a+1) - (a + 1) x^(a+2)
  const double share = (alpha + 2.0) * std::pow(x, alpha + 1.0) - (alpha + 1.0) * std::pow(x, alpha + 2.0);
  return 8.0 * share - 4.0;
}

double m1_shape(double t) {
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-0.5 * (t + 2.0) * (t + 2.0)) +
         1.0 / std::sqrt(2.0 * std::numbers::pi) * std::exp(-2.0 * (t - 2.0) * (t - 2.0));
}

double m1_curve(double alpha, double t) { return m1_shape(m1_warp(alpha, t)); }

double m2_curve(double alpha, double beta, double t) {
  return std::exp(-(t - beta) * (t - beta) / (2.0 * alpha * alpha)) / std::sqrt(2.0 * std::numbers::pi * alpha * alpha);
}

double m3_curve(double alpha, double beta, double t) {
  const double a = t - 0.8 - alpha;
  const double b = t + 0.8 - beta;
  return std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi) + std::exp(-b * b) / std::sqrt(std::numbers::pi);
}

double curve_value(ManifoldId m, const std::array<double, 2>& p, double t) {
  switch (m) {
  case ManifoldId::M1: return m1_curve(p[0], t);
  case ManifoldId::M2: return m2_curve(p[0], p[1], t);
  case ManifoldId::M3: return m3_curve(p[0], p[1], t);
  }
  return 0.0;
}

std::vector<CurveSample> add_noise(const std::vector<CurveSample>& clean, double noise_ratio, std::uint64_t seed,
                                   double* sigma2_out) {
  if (!(noise_ratio >= 0.0)) throw InvalidArgumentError("noise ratio must be nonnegative");
  double sum = 0.0, sum2 = 0.0, count = 0.0;
  for (const auto& s : clean)
    for (double v : s.values) {
      sum += v;
      count += 1.0;
    }
  const double mean = count > 0.0 ? sum / count : 0.0;
  for (const auto& s : clean)
    for (double v : s.values) sum2 += (v - mean) * (v - mean);
  const double sigma2 = count > 0.0 ? noise_ratio * sum2 / count : 0.0;
  if (sigma2_out) *sigma2_out = sigma2;
  std::vector<CurveSample> out = clean;
  if (sigma2 == 0.0) return out;
  Rng rng(seed);
  const double sd = std::sqrt(sigma2);
  for (auto& s : out)
    for (double& v : s.values) v += sd * rng.normal();
  return out;
}

namespace {

// Noise uses its own stream so the curve parameters do not depend on R.
constexpr std::uint64_t kNoiseStream = 0x9E3779B97F4A7C15ULL;

template <class Draw>
SimOutput generate(const SimSpec& spec, Draw draw) {
  spec.validate();
  SimOutput out;
  out.grid = Grid::uniform(spec.lower, spec.upper, spec.grid_size);
  Rng rng(spec.seed);
  std::vector<double> times(spec.points_per_curve);
  const double step = (spec.upper - spec.lower) / static_cast<double>(spec.points_per_curve - 1);
  for (std::size_t j = 0; j < times.size(); ++j) times[j] = spec.lower + step * static_cast<double>(j);
  times.back() = spec.upper;

  std::vector<CurveSample> clean;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::array<double, 2> p = draw(rng);
    out.params.push_back(p);
    CurveSample s{std::to_string(i + 1), times, {}};
    for (double t : times) s.values.push_back(curve_value(spec.manifold, p, t));
    clean.push_back(std::move(s));
    out.truth.push_back(GridFunction::from(out.grid, [&](double t) { return curve_value(spec.manifold, p, t); }));
  }
  out.samples = add_noise(clean, spec.noise_ratio, spec.seed ^ kNoiseStream, &out.sigma2);
  return out;
}

} // namespace

SimOutput gen_m1(const SimSpec& spec) {
  SimSpec s = spec;
  s.manifold = ManifoldId::M1;
  return generate(s, [](Rng& rng) {
    double z;
    do z = rng.normal(0.0, 0.09); while (z <= -1.0); // warp undefined at alpha = -1
    return std::array<double, 2>{z, 0.0};
  });
}

SimOutput gen_m2(const SimSpec& spec) {
  SimSpec s = spec;
  s.manifold = ManifoldId::M2;
  return generate(s, [](Rng& rng) {
    double z;
    do z = rng.normal(1.0, 0.04); while (z <= 0.0); // density undefined at alpha = 0
    const double beta = rng.normal();
    return std::array<double, 2>{z, beta};
  });
}

SimOutput gen_m3(const SimSpec& spec) {
  SimSpec s = spec;
  s.manifold = ManifoldId::M3;
  return generate(s, [](Rng& rng) {
    const double a = rng.normal();
    const double b = rng.normal();
    return std::array<double, 2>{a, b};
  });
}

SimOutput simulate(const SimSpec& spec) {
  switch (spec.manifold) {
  case ManifoldId::M1: return gen_m1(spec);
  case ManifoldId::M2: return gen_m2(spec);
  case ManifoldId::M3: return gen_m3(spec);
  }
  return gen_m1(spec);
}

} // namespace fmca
