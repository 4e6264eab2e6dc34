#include "helpers.hpp"

#include "fmca/error.hpp"
#include "fmca/simulate.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fmca;

namespace {

// Warp by adaptive quadrature of s^a (1 - s) over [0, x], normalized by the full integral.
// tanh-sinh copes with the integrable singularity at 0 for negative a.
double warp_oracle(double a, double t) {
  boost::math::quadrature::tanh_sinh<double> q;
  const auto f = [a](double s) { return std::pow(s, a) * (1.0 - s); };
  const double x = t / 8.0 + 0.5;
  const double part = x <= 0.0 ? 0.0 : q.integrate(f, 0.0, x, 1e-14);
  const double whole = q.integrate(f, 0.0, 1.0, 1e-14);
  return 8.0 * part / whole - 4.0;
}

double pooled_variance(const std::vector<CurveSample>& s) {
  double sum = 0.0, sq = 0.0, n = 0.0;
  for (const auto& c : s)
    for (double v : c.values) {
      sum += v;
      sq += v * v;
      n += 1.0;
    }
  return sq / n - (sum / n) * (sum / n);
}

} // namespace

TEST_SUITE("simulate") {

TEST_CASE("M1 warp endpoints and the alpha = 1 midpoint") {
  for (double a : {-0.6, 0.0, 0.3, 1.0, 2.5}) {
    CHECK(m1_warp(a, -4.0) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(m1_warp(a, 4.0) == doctest::Approx(4.0).epsilon(1e-14));
  }
  CHECK(std::abs(m1_warp(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(warp_oracle(1.0, 0.0)) < 1e-10);
}

TEST_CASE("M1 warp matches adaptive quadrature") {
  for (double a : {-0.7, -0.2, 0.0, 0.45, 1.0, 1.9})
    for (double t = -4.0; t <= 4.0; t += 0.37) {
      const double oracle = warp_oracle(a, t);
      CHECK(std::abs(m1_warp(a, t) - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("M1 warps are increasing and cross only at the endpoints") {
  const auto g = testing::uniform(-4, 4, 101);
  const std::vector<double> alphas{-0.5, -0.1, 0.2, 0.6};
  for (double a : alphas)
    for (std::size_t k = 1; k < g->size(); ++k) CHECK(m1_warp(a, (*g)[k]) > m1_warp(a, (*g)[k - 1]));
  for (std::size_t i = 1; i < alphas.size(); ++i)
    for (std::size_t k = 1; k + 1 < g->size(); ++k)
      CHECK(m1_warp(alphas[i - 1], (*g)[k]) > m1_warp(alphas[i], (*g)[k]));
}

TEST_CASE("M1 shape") {
  const double t = 0.7;
  const double expected = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-0.5 * (t + 2) * (t + 2)) +
                          1.0 / std::sqrt(2.0 * std::numbers::pi) * std::exp(-2.0 * (t - 2) * (t - 2));
  CHECK(m1_shape(t) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(m1_curve(0.3, t) == doctest::Approx(m1_shape(m1_warp(0.3, t))).epsilon(1e-15));
}

TEST_CASE("M2 densities") {
  CHECK(m2_curve(1.0, 0.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  const auto g = testing::uniform(-4, 4, 401);
  for (double a : {0.8, 1.0})
    for (double b : {-0.5, 0.0, 0.5}) {
      const auto f = GridFunction::from(g, [=](double t) { return m2_curve(a, b, t); });
      CHECK(std::abs(integral(f) - 1.0) < 1e-3);
    }
  for (double t = -2.0; t <= 2.0; t += 0.25) CHECK(m2_curve(0.9, 1.0, t + 1.0) == doctest::Approx(m2_curve(0.9, 0.0, t)).epsilon(1e-14));
}

TEST_CASE("M3 two-peak curves") {
  const double bound = 1.0 / std::sqrt(2.0 * std::numbers::pi) + 1.0 / std::sqrt(std::numbers::pi);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.normal(), b = rng.normal(), t = -4.0 + 8.0 * rng.uniform();
    const double v = m3_curve(a, b, t);
    CHECK(v > 0.0);
    CHECK(v <= bound);
    const double closed = std::exp(-0.5 * std::pow(t - 0.8 - a, 2)) / std::sqrt(2.0 * std::numbers::pi) +
                          std::exp(-std::pow(t + 0.8 - b, 2)) / std::sqrt(std::numbers::pi);
    CHECK(v == doctest::Approx(closed).epsilon(1e-15));
  }
  // at alpha = beta = 0 the bumps are centred at 0.8 and -0.8 (they overlap into one mode);
  // pulled apart, each center is a local maximum
  CHECK(m3_curve(0, 0, 0.8) - std::exp(-std::pow(1.6, 2)) / std::sqrt(std::numbers::pi) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  const auto g = testing::uniform(-4, 4, 801);
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < g->size(); ++k) {
    const double l = m3_curve(2, -2, (*g)[k - 1]), c = m3_curve(2, -2, (*g)[k]), r = m3_curve(2, -2, (*g)[k + 1]);
    if (c > l && c > r) peaks.push_back((*g)[k]);
  }
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[0] + 2.8) < 0.02);
  CHECK(std::abs(peaks[1] - 2.8) < 0.02);
}

TEST_CASE("generators are deterministic and aligned") {
  for (ManifoldId m : {ManifoldId::M1, ManifoldId::M2, ManifoldId::M3}) {
    SimSpec spec;
    spec.manifold = m;
    spec.n = 20;
    spec.seed = 42;
    const auto a = simulate(spec);
    const auto b = simulate(spec);
    REQUIRE(a.samples.size() == 20);
    REQUIRE(a.truth.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(a.samples[i].values == b.samples[i].values);
      CHECK(a.samples[i].times.size() == 30);
      CHECK(a.samples[i].times.front() == -4.0);
      CHECK(a.samples[i].times.back() == 4.0);
      CHECK(a.params[i] == b.params[i]);
      for (std::size_t k = 0; k < a.grid->size(); k += 10)
        CHECK(a.truth[i][k] == doctest::Approx(curve_value(m, a.params[i], (*a.grid)[k])).epsilon(1e-14));
    }
    spec.seed = 43;
    CHECK(simulate(spec).params != a.params);
  }
}

TEST_CASE("latent parameters stay in their admissible ranges") {
  SimSpec spec;
  spec.n = 500;
  spec.seed = 9;
  for (const auto& p : gen_m1(spec).params) CHECK(p[0] > -1.0);
  spec.manifold = ManifoldId::M2;
  for (const auto& p : gen_m2(spec).params) CHECK(p[0] > 0.0);
}

TEST_CASE("noise injection") {
  SimSpec spec;
  spec.manifold = ManifoldId::M3;
  spec.n = 200;
  spec.noise_ratio = 0.0;
  spec.seed = 3;
  const auto clean = simulate(spec).samples;
  double s2 = -1.0;
  const auto none = add_noise(clean, 0.0, 5, &s2);
  CHECK(s2 == 0.0);
  for (std::size_t i = 0; i < clean.size(); ++i) CHECK(none[i].values == clean[i].values);

  for (double R : {0.1, 0.5}) {
    const auto noisy = add_noise(clean, R, 5, &s2);
    CHECK(s2 == doctest::Approx(R * pooled_variance(clean)).epsilon(1e-12));
    double sum = 0.0, sq = 0.0, n = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i)
      for (std::size_t j = 0; j < clean[i].size(); ++j) {
        const double e = noisy[i].values[j] - clean[i].values[j];
        sum += e;
        sq += e * e;
        n += 1.0;
      }
    const double ratio = (sq / n - (sum / n) * (sum / n)) / pooled_variance(clean);
    CHECK(n == 6000.0);
    CHECK(std::abs(ratio - R) < 0.1 * R);
    const auto again = add_noise(clean, R, 5);
    CHECK(again[7].values == noisy[7].values);
  }
}

TEST_CASE("simulation settings validation") {
  SimSpec spec;
  spec.n = 1;
  CHECK_THROWS_AS(spec.validate(), InvalidArgumentError);
  spec.n = 10;
  spec.noise_ratio = -0.1;
  CHECK_THROWS_AS(spec.validate(), InvalidArgumentError);
  CHECK_THROWS_AS(parse_manifold("M4"), InvalidArgumentError);
  CHECK(parse_manifold("M2") == ManifoldId::M2);
  CHECK(intrinsic_dimension(ManifoldId::M1) == 1);
  CHECK(intrinsic_dimension(ManifoldId::M3) == 2);
}

}
