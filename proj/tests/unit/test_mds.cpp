#include "helpers.hpp"

#include "fmca/error.hpp"
#include "fmca/mds.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace fmca;

TEST_SUITE("mds") {

TEST_CASE("three collinear points recover the centered coordinates") {
  Eigen::MatrixXd p(3, 1);
  p << 0.0, 1.0, 3.0;
  const auto e = classical_mds(testing::euclidean(p), 1);
  const double sign = e.coordinates(2, 0) > 0 ? 1.0 : -1.0;
  CHECK(sign * e.coordinates(0, 0) == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
  CHECK(sign * e.coordinates(1, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(sign * e.coordinates(2, 0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(fde(testing::euclidean(p), e) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("two points at distance two") {
  DistanceMatrix D(2, 2);
  D << 0, 2, 2, 0;
  const auto e = classical_mds(D, 1);
  CHECK(std::abs(e.coordinates(0, 0)) == doctest::Approx(1.0));
  CHECK(e.coordinates(0, 0) == doctest::Approx(-e.coordinates(1, 0)));
}

TEST_CASE("rectangle distances are reproduced") {
  Eigen::MatrixXd p(4, 2);
  p << 0, 0, 3, 0, 3, 2, 0, 2;
  const auto D = testing::euclidean(p);
  const auto e = classical_mds(D, 2);
  CHECK((embedding_distances(e.coordinates) - D).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fde(D, e) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!e.padded);
}

TEST_CASE("sign convention and centering") {
  Rng rng(6);
  const auto D = testing::euclidean(testing::random_points(rng, 30, 3));
  const auto e = classical_mds(D, 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    CHECK(std::abs(e.coordinates.col(c).sum()) < 1e-10);
    Eigen::Index arg;
    e.coordinates.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(e.coordinates(arg, c) > 0.0);
  }
  for (std::size_t k = 1; k < e.eigenvalues.size(); ++k) CHECK(e.eigenvalues[k] <= e.eigenvalues[k - 1] + 1e-12);
}

TEST_CASE("embedding distances are invariant to rotations") {
  Rng rng(8);
  const auto P = testing::random_points(rng, 12, 2);
  const double a = 0.83;
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const Eigen::MatrixXd Q = P * R.transpose();
  const auto e1 = classical_mds(testing::euclidean(P), 2);
  const auto e2 = classical_mds(testing::euclidean(Q), 2);
  CHECK((embedding_distances(e1.coordinates) - embedding_distances(e2.coordinates)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dimension above the positive spectrum is padded") {
  Eigen::MatrixXd p(5, 1);
  p << 0, 1, 2, 4, 7;
  const auto e = classical_mds(testing::euclidean(p), 3);
  CHECK(e.padded);
  CHECK(e.d() == 3);
  CHECK(e.coordinates.col(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("FDE on exact low-rank data and monotonicity") {
  Eigen::MatrixXd line(20, 3);
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    const double s = rng.normal();
    line.row(i) << s, 2 * s, -s;
  }
  const auto L = testing::euclidean(line);
  const auto choice = select_dimension(L, 0.05, 10);
  CHECK(choice.d == 1);
  CHECK(choice.converged);
  CHECK(choice.fde[0] == doctest::Approx(1.0).epsilon(1e-8));

  const auto P = testing::euclidean(testing::random_points(rng, 25, 2));
  const MdsSpectrum spec(P);
  for (std::size_t d = 2; d <= 4; ++d) CHECK(fde(P, spec.embed(d)) == doctest::Approx(1.0).epsilon(1e-8));

  // non-Euclidean input: FDE still grows with nested truncations
  DistanceMatrix G = P;
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j) G(i, j) = std::sqrt(P(i, j));
  const MdsSpectrum sg(G);
  double prev = -INFINITY;
  for (std::size_t d = 1; d <= 6; ++d) {
    const double f = fde(G, sg.embed(d));
    CHECK(f >= prev - 1e-12);
    prev = f;
  }
}

TEST_CASE("select_dimension reports non-convergence") {
  Rng rng(3);
  const auto D = testing::euclidean(testing::random_points(rng, 30, 6));
  const auto c = select_dimension(D, 1e-6, 3);
  CHECK(c.d == 3);
  CHECK(!c.converged);
  CHECK(c.fde.size() == 3);
}

TEST_CASE("zero distance matrix is degenerate for FDE") {
  const DistanceMatrix D = DistanceMatrix::Zero(3, 3);
  Embedding e;
  e.coordinates = Eigen::MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(fde(D, e), DegenerateError);
}

}
