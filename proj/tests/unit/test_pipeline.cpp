#include "helpers.hpp"

#include "fmca/error.hpp"
#include "fmca/parallel.hpp"
#include "fmca/pipeline.hpp"
#include "fmca/serialize.hpp"
#include "fmca/simulate.hpp"
#include "fmca/svg.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace fmca;

namespace {

SimOutput sim(ManifoldId m, std::size_t n, std::uint64_t seed, double R = 0.1) {
  SimSpec spec;
  spec.manifold = m;
  spec.n = n;
  spec.seed = seed;
  spec.noise_ratio = R;
  return simulate(spec);
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("parallel_for covers every index and rethrows the first failure") {
  for (std::size_t threads : {1u, 3u}) {
    set_max_threads(threads);
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
    try {
      parallel_for(50, [](std::size_t i) {
        if (i == 17 || i == 31) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
  set_max_threads(0);
}

TEST_CASE("epsilon candidates respect the connectivity bound") {
  const auto s = sim(ManifoldId::M3, 80, 2);
  const auto D = pairwise_l2(s.truth);
  FitOptions opt;
  const auto eps = epsilon_candidates(D, opt);
  const double floor = connectivity_lower_bound(D, opt.max_disconnected_fraction);
  REQUIRE(!eps.empty());
  for (double e : eps) {
    CHECK(e >= floor);
    CHECK(static_cast<double>(component_sizes(D, e).front()) >= 0.95 * 80);
  }
  for (std::size_t i = 1; i < eps.size(); ++i) CHECK(eps[i] != eps[i - 1]);
}

TEST_CASE("end-to-end fit and model round trip") {
  const auto s = sim(ManifoldId::M1, 60, 4);
  FitOptions opt;
  opt.seed = 7;
  opt.h_count = 4;
  const auto fit = fit_manifold(s.samples, opt);
  CHECK(fit.chosen.d >= 1);
  CHECK(fit.chosen.retained.size() + fit.excluded.size() == 60);
  CHECK(fit.chosen.model.n() == fit.chosen.retained.size());
  CHECK(fit.fde_by_dim.size() >= 1);

  const auto doc = model_to_json(fit, opt);
  CHECK(doc.at("format") == "fmca-model");
  const auto text = doc.dump();
  const auto stored = model_from_json(Json::parse(text));
  CHECK(model_to_json(fit, opt).dump() == text);
  CHECK(stored.subject_ids.size() == 60);
  CHECK(stored.manifold.h == fit.chosen.model.h);
  CHECK(stored.manifold.embedding.coordinates == fit.chosen.model.embedding.coordinates);
  const auto a = predict_all_loo(fit.chosen.model, opt.max_doublings);
  const auto b = predict_all_loo(stored.manifold, stored.max_doublings);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(testing::max_abs_diff(a[i], b[i]) == 0.0);
  CHECK(testing::max_abs_diff(manifold_mean(fit.chosen.model), manifold_mean(stored.manifold)) == 0.0);

  Json broken = Json::parse(text);
  broken["format"] = "something-else";
  CHECK_THROWS_AS(model_from_json(broken), ParseError);
}

TEST_CASE("options document round trip and unknown keys") {
  FitOptions opt;
  opt.grid_size = 51;
  opt.epsilon_knn = {3, 4};
  opt.fpca.kernel = Kernel::Gaussian;
  opt.length = GeodesicLength::Penalized;
  FitOptions back;
  apply_options_json(options_to_json(opt), back);
  CHECK(options_to_json(back).dump() == options_to_json(opt).dump());
  CHECK(back.grid_size == 51);
  CHECK(back.fpca.kernel == Kernel::Gaussian);
  Json bad = Json::object();
  bad["no_such_key"] = 1;
  CHECK_THROWS_AS(apply_options_json(bad, back), InvalidArgumentError);
}

TEST_CASE("svg output is a self-contained document") {
  Plot p;
  p.title = "a < b";
  p.series.push_back({"one", {0, 1, 2}, {1, 3, 2}});
  const auto svg = render_svg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a &lt; b") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("M2 manifold mean is closer to the standard normal density than the cross-sectional mean") {
  int closer = 0;
  const int seeds = 5;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto s = sim(ManifoldId::M2, 200, 100 + seed);
    FitOptions opt;
    opt.seed = static_cast<std::uint64_t>(seed);
    opt.dim = 2;
    const auto fit = fit_manifold(s.samples, opt);
    const auto target = GridFunction::from(s.grid, [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2 * std::numbers::pi); });
    const double dm = l2_distance(manifold_mean(fit.chosen.model, opt.max_doublings), target);
    const double dc = l2_distance(cross_sectional_mean(s.truth), target);
    MESSAGE("seed " << seed << ": manifold " << dm << ", cross-sectional " << dc);
    if (dm < dc) ++closer;
  }
  CHECK(closer >= 0.9 * seeds);
}

}
