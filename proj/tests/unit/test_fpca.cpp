#include "helpers.hpp"

#include "fmca/error.hpp"
#include "fmca/fpca.hpp"
#include "fmca/serialize.hpp"
#include "fmca/simulate.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace fmca;

namespace {

// Cyclic Jacobi rotations on a dense symmetric matrix; returns sorted eigenvalues.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Orthonormal trigonometric basis on [0, 1] under the trapezoid rule (after Gram-Schmidt).
std::vector<GridFunction> basis(const GridPtr& g, int count) {
  std::vector<GridFunction> out;
  for (int k = 0; k < count; ++k) {
    auto f = GridFunction::from(g, [k](double t) {
      return k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(k * std::numbers::pi * t);
    });
    for (const auto& e : out) f -= l2_inner(f, e) * e;
    f *= 1.0 / l2_norm(f);
    out.push_back(std::move(f));
  }
  return out;
}

Surface outer_sum(const std::vector<GridFunction>& phi, const std::vector<double>& lambda) {
  const auto n = static_cast<Eigen::Index>(phi[0].size());
  Surface S = Surface::Zero(n, n);
  for (std::size_t k = 0; k < phi.size(); ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) S(i, j) += lambda[k] * phi[k][i] * phi[k][j];
  return S;
}

std::vector<CurveSample> sampled(const std::vector<GridFunction>& curves, std::size_t m, Rng& rng, double noise_sd) {
  std::vector<CurveSample> out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    CurveSample s{"s" + std::to_string(i), {}, {}};
    const auto& g = curves[i].grid();
    for (std::size_t j = 0; j < m; ++j) s.times.push_back(g.lower() + g.length() * rng.uniform());
    std::sort(s.times.begin(), s.times.end());
    for (double t : s.times) s.values.push_back(curves[i].at(t) + noise_sd * rng.normal());
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace

TEST_SUITE("fpca") {

TEST_CASE("mean of two constant curves is their midpoint") {
  const auto g = testing::uniform(0, 1, 21);
  std::vector<CurveSample> s;
  std::vector<double> t;
  for (int j = 0; j <= 20; ++j) t.push_back(j / 20.0);
  s.push_back({"a", t, std::vector<double>(t.size(), 1.0)});
  s.push_back({"b", t, std::vector<double>(t.size(), 3.0)});
  const auto mu = estimate_mean(s, g, 0.2);
  for (double v : mu.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mean of identical linear curves is exact") {
  const auto g = testing::uniform(0, 1, 21);
  std::vector<CurveSample> s;
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    CurveSample c{"c", {0.0, 1.0}, {}};
    for (int j = 0; j < 8; ++j) c.times.push_back(rng.uniform());
    std::sort(c.times.begin(), c.times.end());
    for (double tt : c.times) c.values.push_back(1.0 + 2.0 * tt);
    s.push_back(c);
  }
  const auto mu = estimate_mean(s, g, 0.25);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(mu[i] == doctest::Approx(1.0 + 2.0 * (*g)[i]).epsilon(1e-10));
}

TEST_CASE("covariance of random constants is flat and noise is recovered") {
  const auto g = testing::uniform(0, 1, 26);
  Rng rng(17);
  std::vector<GridFunction> curves;
  std::vector<double> c;
  for (int i = 0; i < 200; ++i) {
    c.push_back(rng.normal());
    curves.push_back(GridFunction::constant(g, c.back()));
  }
  double cbar = 0.0, var = 0.0;
  for (double v : c) cbar += v / 200.0;
  for (double v : c) var += (v - cbar) * (v - cbar) / 200.0;

  SUBCASE("noiseless") {
    const auto s = sampled(curves, 20, rng, 0.0);
    const auto mu = estimate_mean(s, g, 0.2);
    const auto cov = estimate_covariance(s, mu, 0.2);
    CHECK(cov.sigma2 < 0.05 * cov.surface.diagonal().maxCoeff());
    // local smoothing noise is a few percent; the surface average tracks the sample variance
    CHECK(std::abs(cov.surface.mean() - var) < 0.05 * var);
    for (Eigen::Index i = 5; i <= 20; ++i)
      for (Eigen::Index j = 5; j <= 20; ++j) CHECK(std::abs(cov.surface(i, j) - var) < 0.2 * var);
  }
  SUBCASE("noise variance 0.25") {
    const auto s = sampled(curves, 20, rng, 0.5);
    const auto mu = estimate_mean(s, g, 0.2);
    const auto cov = estimate_covariance(s, mu, 0.2);
    CHECK(std::abs(cov.sigma2 - 0.25) <= 0.05);
  }
}

TEST_CASE("covariance needs at least two subjects") {
  const auto g = testing::uniform(0, 1, 11);
  std::vector<CurveSample> s{{"a", {0.0, 0.5, 1.0}, {1, 2, 3}}};
  const auto mu = GridFunction::constant(g, 0.0);
  CHECK_THROWS_AS(estimate_covariance(s, mu, 0.5), InsufficientDataError);
}

TEST_CASE("rank-one surface") {
  const auto g = testing::uniform(0, 1, 51);
  const auto phi = basis(g, 2);
  const auto dec = eigendecompose(outer_sum({phi[1]}, {1.0}), g);
  REQUIRE(!dec.eigenvalues.empty());
  CHECK(dec.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t k = 1; k < dec.eigenvalues.size(); ++k) CHECK(dec.eigenvalues[k] < 1e-10);
  CHECK(std::abs(std::abs(l2_inner(dec.eigenfunctions[0], phi[1])) - 1.0) < 1e-10);
}

TEST_CASE("constructed spectrum (3, 2, 1)") {
  const auto g = testing::uniform(0, 1, 51);
  const auto phi = basis(g, 3);
  const auto dec = eigendecompose(outer_sum(phi, {1.0, 2.0, 3.0}), g);
  REQUIRE(dec.eigenvalues.size() >= 3);
  CHECK(dec.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(dec.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(dec.eigenvalues[2] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigenvalues match a Jacobi oracle and eigenfunctions are orthonormal") {
  const auto g = std::make_shared<const Grid>(std::vector<double>{0.0, 0.05, 0.12, 0.2, 0.33, 0.41, 0.5, 0.62,
                                                                  0.7, 0.77, 0.85, 0.93, 1.0});
  Rng rng(4);
  const auto n = static_cast<Eigen::Index>(g->size());
  Eigen::MatrixXd A(n, 4);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < 4; ++k) A(i, k) = rng.normal();
  const Surface S = A * A.transpose();
  Eigen::MatrixXd weighted(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) weighted(i, j) = std::sqrt(g->weights()[i] * g->weights()[j]) * S(i, j);
  const auto oracle = jacobi_eigenvalues(weighted);
  const auto dec = eigendecompose(S, g);
  REQUIRE(dec.eigenvalues.size() >= 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(dec.eigenvalues[k] - oracle[k]) < 1e-8);
  for (std::size_t k = 1; k < dec.eigenvalues.size(); ++k) CHECK(dec.eigenvalues[k] <= dec.eigenvalues[k - 1]);
  for (std::size_t a = 0; a < dec.eigenfunctions.size(); ++a) {
    CHECK(integral(dec.eigenfunctions[a]) >= 0.0);
    for (std::size_t b = 0; b < dec.eigenfunctions.size(); ++b)
      CHECK(std::abs(l2_inner(dec.eigenfunctions[a], dec.eigenfunctions[b]) - (a == b ? 1.0 : 0.0)) < 1e-6);
  }
}

TEST_CASE("integration scores") {
  const auto g = testing::uniform(0, 1, 201);
  const auto phi = basis(g, 3);
  const auto mu = GridFunction::from(g, [](double t) { return std::sin(2 * t); });

  CurveSample on_mean{"a", {}, {}};
  for (int j = 0; j <= 200; ++j) {
    on_mean.times.push_back(j / 200.0);
    on_mean.values.push_back(mu[j]);
  }
  for (double v : scores_integration(on_mean, mu, phi)) CHECK(std::abs(v) < 1e-14);

  CurveSample shifted = on_mean;
  for (int j = 0; j <= 200; ++j) shifted.values[j] += 2.0 * phi[0][j];
  const auto xi = scores_integration(shifted, mu, phi);
  CHECK(xi[0] == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::abs(xi[1]) < 0.02);
  CHECK(std::abs(xi[2]) < 0.02);

  // Riemann sum with left differences, the first spacing measured from the domain start
  Rng rng(8);
  CurveSample r{"r", {}, {}};
  for (int j = 0; j < 40; ++j) r.times.push_back(rng.uniform());
  std::sort(r.times.begin(), r.times.end());
  for (int j = 0; j < 40; ++j) r.values.push_back(rng.normal());
  const auto got = scores_integration(r, mu, phi);
  for (std::size_t k = 0; k < 3; ++k) {
    double sum = 0.0, prev = 0.0;
    for (int j = 0; j < 40; ++j) {
      sum += (r.values[j] - mu.at(r.times[j])) * phi[k].at(r.times[j]) * (r.times[j] - prev);
      prev = r.times[j];
    }
    CHECK(got[k] == sum);
  }
}

TEST_CASE("conditional scores") {
  const auto g = testing::uniform(0, 1, 101);
  FpcaModel model;
  model.mean = GridFunction::from(g, [](double t) { return t * t; });
  model.eigenfunctions = basis(g, 2);
  model.eigenvalues = {2.0, 0.5};
  model.sigma2 = 0.1;

  CurveSample s{"a", {0.05, 0.3, 0.45, 0.7, 0.95}, {0.4, -0.2, 1.1, 0.9, 0.3}};

  Eigen::MatrixXd Sigma(5, 5);
  Eigen::VectorXd r(5);
  for (int j = 0; j < 5; ++j) {
    r(j) = s.values[j] - model.mean.at(s.times[j]);
    for (int l = 0; l < 5; ++l) {
      Sigma(j, l) = 0.0;
      for (int k = 0; k < 2; ++k)
        Sigma(j, l) += model.eigenvalues[k] * model.eigenfunctions[k].at(s.times[j]) * model.eigenfunctions[k].at(s.times[l]);
      if (j == l) Sigma(j, l) += 0.1;
    }
  }
  const Eigen::VectorXd solved = Sigma.fullPivLu().solve(r);
  const auto xi = scores_conditional(s, model);
  for (int k = 0; k < 2; ++k) {
    double oracle = 0.0;
    for (int j = 0; j < 5; ++j) oracle += model.eigenfunctions[k].at(s.times[j]) * solved(j);
    oracle *= model.eigenvalues[k];
    CHECK(std::abs(xi[k] - oracle) < 1e-10);
  }

  CurveSample flat = s;
  for (int j = 0; j < 5; ++j) flat.values[j] = model.mean.at(s.times[j]);
  for (double v : scores_conditional(flat, model)) CHECK(v == 0.0);

  model.eigenvalues = {2.0, 0.0};
  CHECK(scores_conditional(s, model)[1] == 0.0);
}

TEST_CASE("fraction of variance explained") {
  CHECK(select_K_fve(std::vector<double>{1, 0, 0}, 0.05) == 1);
  CHECK(select_K_fve(std::vector<double>{4, 3, 2, 1}, 0.05) == 4);
  CHECK(select_K_fve(std::vector<double>{9, 1}, 0.1) == 1);
  CHECK_THROWS_AS(select_K_fve(std::vector<double>{0, 0}, 0.05), DegenerateError);
}

TEST_CASE("reconstruction") {
  const auto g = testing::uniform(0, 1, 101);
  const auto phi = basis(g, 3);
  const auto mu = GridFunction::from(g, [](double t) { return std::exp(t); });
  const std::vector<double> xi{0.7, -1.2, 0.4};
  CHECK(testing::max_abs_diff(reconstruct(mu, phi, xi, 0), mu) == 0.0);
  CHECK(testing::max_abs_diff(reconstruct(mu, phi, std::vector<double>{0, 0, 0}, 3), mu) == 0.0);

  const auto x = reconstruct(mu, phi, xi, 3);
  std::vector<double> proj;
  for (const auto& p : phi) proj.push_back(l2_inner(x - mu, p));
  CHECK(testing::max_abs_diff(reconstruct(mu, phi, proj, 3), x) < 1e-8);
}

TEST_CASE("fit on M2: mean, orthonormality, decorrelation, lossless JSON") {
  SimSpec spec;
  spec.manifold = ManifoldId::M2;
  spec.n = 200;
  spec.seed = 3;
  const auto sim = simulate(spec);
  const auto model = fit_fpca(sim.samples, sim.grid);

  CHECK(l2_distance(model.mean, cross_sectional_mean(sim.truth)) < 0.1);
  for (std::size_t k = 1; k < model.eigenvalues.size(); ++k) CHECK(model.eigenvalues[k] <= model.eigenvalues[k - 1]);
  for (std::size_t a = 0; a < model.components(); ++a)
    for (std::size_t b = 0; b < model.components(); ++b)
      CHECK(std::abs(l2_inner(model.eigenfunctions[a], model.eigenfunctions[b]) - (a == b ? 1.0 : 0.0)) < 1e-6);

  const Eigen::MatrixXd Z = model.scores.leftCols(model.K);
  const Eigen::MatrixXd C = Z.rowwise() - Z.colwise().mean();
  const Eigen::MatrixXd cov = C.transpose() * C;
  for (Eigen::Index a = 0; a < cov.rows(); ++a) {
    const double lam = model.eigenvalues[static_cast<std::size_t>(a)];
    CHECK(std::abs(Z.col(a).mean()) < 3.0 * std::sqrt(lam / 200.0));
    for (Eigen::Index b = 0; b < a; ++b) CHECK(std::abs(cov(a, b) / std::sqrt(cov(a, a) * cov(b, b))) < 0.2);
  }

  // reconstruction error against noiseless truth does not grow with K (on average)
  double prev = INFINITY;
  for (std::size_t K = 0; K <= model.K; ++K) {
    double err = 0.0;
    for (std::size_t i = 0; i < sim.truth.size(); ++i) err += std::pow(l2_distance(model.fitted_curve(i, K), sim.truth[i]), 2);
    CHECK(err <= prev * (1.0 + 1e-9));
    prev = err;
  }

  const auto doc = fpca_to_json(model);
  const auto back = fpca_from_json(Json::parse(doc.dump()));
  CHECK(back.eigenvalues == model.eigenvalues);
  CHECK(back.sigma2 == model.sigma2);
  CHECK(back.K == model.K);
  CHECK(back.scores == model.scores);
  CHECK(testing::max_abs_diff(back.mean, model.mean) == 0.0);
  for (std::size_t k = 0; k < model.components(); ++k)
    CHECK(testing::max_abs_diff(back.eigenfunctions[k], model.eigenfunctions[k]) == 0.0);
}

}
