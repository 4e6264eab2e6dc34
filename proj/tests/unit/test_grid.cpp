#include "helpers.hpp"

#include "fmca/error.hpp"
#include "fmca/grid.hpp"
#include "fmca/io.hpp"

#include <doctest.h>

#include <numeric>
#include <sstream>

using namespace fmca;

TEST_SUITE("grid") {

TEST_CASE("trapezoid weights are positive and sum to the domain length") {
  const Grid g({-1.0, -0.3, 0.2, 1.5, 4.0});
  double sum = 0.0;
  for (double w : g.weights()) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("grid rejects non-increasing or short point sets") {
  CHECK_THROWS_AS(Grid({0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(Grid({0.0, 0.0, 1.0}), InvalidArgumentError);
  CHECK_THROWS_AS(Grid({1.0, 0.0}), InvalidArgumentError);
}

TEST_CASE("inner product examples") {
  auto g = testing::uniform(-4, 4, 101);
  const auto zero = GridFunction::constant(g, 0.0);
  const auto one = GridFunction::constant(g, 1.0);
  const auto wiggle = GridFunction::from(g, [](double t) { return std::sin(3 * t) + t * t; });
  CHECK(l2_inner(zero, wiggle) == 0.0);
  CHECK(l2_inner(one, one) == doctest::Approx(8.0).epsilon(1e-14));

  // analytic oracle: int_0^1 t^2 dt = 1/3, trapezoid error h^2/6 * (f'(1) - f'(0)) / 2 ... bounded by h^2/6
  auto u = testing::uniform(0, 1, 201);
  const auto t = GridFunction::from(u, [](double x) { return x; });
  const double h = 1.0 / 200.0;
  CHECK(std::abs(l2_inner(t, t) - 1.0 / 3.0) <= h * h / 6.0 + 1e-15);
}

TEST_CASE("trapezoid rule is exact for piecewise-linear integrands") {
  const auto g = std::make_shared<const Grid>(std::vector<double>{0.0, 0.5, 2.0, 2.25, 3.0});
  const GridFunction f(g, {1.0, -2.0, 0.5, 3.0, 1.0});
  // exact integral of the linear interpolant, segment by segment
  double exact = 0.0;
  for (std::size_t k = 0; k + 1 < g->size(); ++k) exact += 0.5 * (f[k] + f[k + 1]) * ((*g)[k + 1] - (*g)[k]);
  CHECK(integral(f) == doctest::Approx(exact).epsilon(1e-15));
}

TEST_CASE("mismatched grids are rejected") {
  const auto a = GridFunction::constant(testing::uniform(0, 1, 11), 1.0);
  const auto b = GridFunction::constant(testing::uniform(0, 1, 12), 1.0);
  CHECK_THROWS_AS(l2_inner(a, b), GridMismatchError);
  CHECK_THROWS_AS(l2_distance(a, b), GridMismatchError);
}

TEST_CASE("equal point sets on distinct grid objects are compatible") {
  const auto a = GridFunction::constant(testing::uniform(0, 1, 11), 1.0);
  const auto b = GridFunction::constant(testing::uniform(0, 1, 11), 3.0);
  CHECK(l2_distance(a, b) == doctest::Approx(2.0));
}

TEST_CASE("linear interpolation and constant extrapolation") {
  const auto g = testing::uniform(0, 2, 3);
  const GridFunction f(g, {0.0, 2.0, 1.0});
  CHECK(f.at(0.5) == doctest::Approx(1.0));
  CHECK(f.at(1.5) == doctest::Approx(1.5));
  CHECK(f.at(-1.0) == 0.0);
  CHECK(f.at(5.0) == 1.0);
  CHECK(f.at(1.0) == 2.0);
}

TEST_CASE("non-finite values are rejected") {
  const auto g = testing::uniform(0, 1, 3);
  CHECK_THROWS_AS(GridFunction(g, {0.0, std::nan(""), 1.0}), InvalidArgumentError);
  CHECK_THROWS_AS(GridFunction(g, {0.0, 1.0}), InvalidArgumentError);
}

TEST_CASE("curve sample validation") {
  CurveSample ok{"a", {0.0, 0.5, 0.5, 1.0}, {1, 2, 3, 4}};
  CHECK_NOTHROW(ok.validate());
  CurveSample short_one{"b", {0.0}, {1.0}};
  CHECK_THROWS_AS(short_one.validate(), InvalidArgumentError);
  CurveSample decreasing{"c", {0.0, 1.0, 0.5}, {1, 2, 3}};
  CHECK_THROWS_AS(decreasing.validate(), InvalidArgumentError);
  CurveSample ragged{"d", {0.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(ragged.validate(), InvalidArgumentError);
}

}

TEST_SUITE("io") {

TEST_CASE("curve csv groups subjects in first-appearance order and sorts times") {
  std::istringstream in("subject_id,t,y\nb,1.0,2\na,0.5,1\nb,0.0,3\na,0.0,4\n");
  const auto s = read_curves_csv(in);
  REQUIRE(s.size() == 2);
  CHECK(s[0].subject_id == "b");
  CHECK(s[0].times == std::vector<double>{0.0, 1.0});
  CHECK(s[0].values == std::vector<double>{3.0, 2.0});
  CHECK(s[1].subject_id == "a");
  CHECK(s[1].values == std::vector<double>{4.0, 1.0});
}

TEST_CASE("malformed csv reports the line number") {
  std::istringstream bad("subject_id,t,y\na,0,1\na,zero,2\n");
  try {
    read_curves_csv(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream cols("subject_id,t,y\na,0\n");
  CHECK_THROWS_AS(read_curves_csv(cols), ParseError);
  std::istringstream header("id,time,value\na,0,1\n");
  CHECK_THROWS_AS(read_curves_csv(header), ParseError);
}

TEST_CASE("empty input is a parse error") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_curves_csv(empty), ParseError);
  std::istringstream header_only("subject_id,t,y\n");
  CHECK_THROWS_AS(read_curves_csv(header_only), ParseError);
}

TEST_CASE("csv round trip is exact") {
  std::vector<CurveSample> s{{"x", {0.1, 1.0 / 3.0, 0.7}, {1e-300, -2.5, 3.141592653589793}},
                             {"y", {0.0, 1.0}, {0.1, 0.2}}};
  std::ostringstream out;
  write_curves_csv(out, s);
  std::istringstream in(out.str());
  const auto back = read_curves_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].times == s[0].times);
  CHECK(back[0].values == s[0].values);
  CHECK(back[1].values == s[1].values);
}

TEST_CASE("curves_on_grid interpolates each subject") {
  const auto g = testing::uniform(0, 1, 5);
  std::vector<CurveSample> s{{"a", {0.0, 1.0}, {0.0, 4.0}}};
  const auto c = curves_on_grid(s, g);
  CHECK(c[0][2] == doctest::Approx(2.0));
  CHECK(c[0][4] == doctest::Approx(4.0));
}

}
