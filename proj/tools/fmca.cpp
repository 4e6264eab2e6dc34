// fmca command-line front end: fit, predict, modes, mean, scores, simulate, benchmark.

#include "fmca/error.hpp"
#include "fmca/io.hpp"
#include "fmca/manifold.hpp"
#include "fmca/parallel.hpp"
#include "fmca/pipeline.hpp"
#include "fmca/serialize.hpp"
#include "fmca/simulate.hpp"
#include "fmca/svg.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef FMCA_VERSION
#define FMCA_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace fmca;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return o.str();
}

// Number formatting shared by every CSV: shortest text that reads back exactly.
std::string num(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[40];
  for (int p = 15; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class Run {
public:
  Run(std::string command, fs::path out_dir) : command_(std::move(command)), dir_(std::move(out_dir)) {
    fs::create_directories(dir_);
    manifest_["command"] = command_;
    manifest_["version"] = FMCA_VERSION;
    manifest_["threads"] = max_threads();
  }

  Json& manifest() { return manifest_; }
  const fs::path& dir() const { return dir_; }

  void digest(const fs::path& input) {
    manifest_["inputs"][input.string()] = "sha256:" + sha256_hex(read_file(input));
  }

  void write(const std::string& name, const std::string& contents) {
    write_file(dir_ / name, contents);
    manifest_["outputs"].push_back(name);
  }

  void finish() {
    manifest_["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(dir_ / ("manifest_" + command_ + ".json"), manifest_.dump(2) + "\n");
  }

private:
  std::string command_;
  fs::path dir_;
  Json manifest_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Flag, then config file, then FMCA_SEED, then the built-in default.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, bool config_has_seed,
                           std::uint64_t current) {
  if (flag->count() > 0) return flag_value;
  if (config_has_seed) return current;
  if (const char* env = std::getenv("FMCA_SEED"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw InvalidArgumentError("FMCA_SEED must be a nonnegative integer");
    return v;
  }
  return current;
}

StoredModel load_model(const fs::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0);
  }
  return model_from_json(doc);
}

std::string grid_curves_csv(const std::vector<std::string>& ids, const std::vector<GridFunction>& curves) {
  std::ostringstream o;
  o << "subject_id,t,y\n";
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t g = 0; g < curves[i].size(); ++g)
      o << ids[i] << ',' << num(curves[i].grid()[g]) << ',' << num(curves[i][g]) << '\n';
  return o.str();
}

Series curve_series(std::string label, const GridFunction& f) {
  return {std::move(label), {f.grid().points().begin(), f.grid().points().end()}, {f.values().begin(), f.values().end()}};
}

// ---- fit -------------------------------------------------------------------

struct FitFlags {
  std::string input, out_dir = "fmca_out", config;
  std::uint64_t seed = 0;
  std::size_t dim = 0, grid_size = 101, folds = 10, h_count = 8, d_max = 10;
  std::string kernel = "epanechnikov", score_method = "auto", curve_source = "kl", length = "unpenalized";
  double fve_alpha = 0.05, beta = 0.05, max_disconnected = 0.05;
  std::vector<int> epsilon_knn;
  std::vector<double> epsilon_values, delta_fractions;
  int max_doublings = 3;
};

void cmd_fit(const FitFlags& f, const CLI::App& app) {
  FitOptions opts;
  bool config_seed = false;
  if (!f.config.empty()) {
    Json cfg;
    try {
      cfg = Json::parse(read_file(f.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
    }
    apply_options_json(cfg, opts);
    config_seed = cfg.contains("seed");
  }
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (given("--dim")) opts.dim = f.dim;
  if (given("--grid-size")) opts.grid_size = f.grid_size;
  if (given("--folds")) opts.folds = f.folds;
  if (given("--h-count")) opts.h_count = f.h_count;
  if (given("--d-max")) opts.d_max = f.d_max;
  if (given("--kernel")) opts.fpca.kernel = parse_kernel(f.kernel);
  if (given("--score-method")) opts.fpca.score_method = parse_score_method(f.score_method);
  if (given("--curve-source")) opts.curve_source = parse_curve_source(f.curve_source);
  if (given("--geodesic-length")) opts.length = parse_geodesic_length(f.length);
  if (given("--fve-alpha")) opts.fpca.fve_alpha = f.fve_alpha;
  if (given("--beta")) opts.beta = f.beta;
  if (given("--max-disconnected")) opts.max_disconnected_fraction = f.max_disconnected;
  if (given("--epsilon-knn")) opts.epsilon_knn = f.epsilon_knn;
  if (given("--epsilon")) opts.epsilon_values = f.epsilon_values;
  if (given("--delta-fractions")) opts.delta_fractions = f.delta_fractions;
  if (given("--max-doublings")) opts.max_doublings = f.max_doublings;
  opts.seed = resolve_seed(app.get_option("--seed"), f.seed, config_seed, opts.seed);

  Run run("fit", f.out_dir);
  run.digest(f.input);
  const auto samples = read_curves_csv(fs::path(f.input));
  const FitResult fit = fit_manifold(samples, opts);
  const auto& model = fit.chosen.model;
  const auto& emb = model.embedding;

  run.write("model.json", model_to_json(fit, opts).dump(1) + "\n");

  std::ostringstream e;
  e << "subject_id";
  for (std::size_t k = 1; k <= emb.d(); ++k) e << ",coord_" << k;
  e << '\n';
  for (std::size_t r = 0; r < emb.n(); ++r) {
    e << fit.subject_ids[emb.source_indices[r]];
    for (std::size_t k = 0; k < emb.d(); ++k)
      e << ',' << num(emb.coordinates(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
    e << '\n';
  }
  run.write("embedding.csv", e.str());

  std::ostringstream t;
  t << "d,fde\n";
  for (std::size_t d = 0; d < fit.fde_by_dim.size(); ++d) t << d + 1 << ',' << num(fit.fde_by_dim[d]) << '\n';
  run.write("fde.csv", t.str());

  std::ostringstream cv;
  write_cv_csv(cv, fit.chosen.cv);
  run.write("cv.csv", cv.str());

  Plot p;
  p.points = true;
  p.title = "Manifold embedding";
  if (emb.d() >= 2) {
    p.x_label = "coordinate 1";
    p.y_label = "coordinate 2";
    p.series.push_back({"subjects", {}, {}});
    for (std::size_t r = 0; r < emb.n(); ++r) {
      p.series[0].x.push_back(emb.coordinates(static_cast<Eigen::Index>(r), 0));
      p.series[0].y.push_back(emb.coordinates(static_cast<Eigen::Index>(r), 1));
    }
  } else {
    p.x_label = "subject index";
    p.y_label = "coordinate 1";
    p.series.push_back({"subjects", {}, {}});
    for (std::size_t r = 0; r < emb.n(); ++r) {
      p.series[0].x.push_back(static_cast<double>(emb.source_indices[r]));
      p.series[0].y.push_back(emb.coordinates(static_cast<Eigen::Index>(r), 0));
    }
  }
  run.write("embedding.svg", render_svg(p));

  auto& m = run.manifest();
  m["config"] = options_to_json(opts);
  m["seed"] = opts.seed;
  m["result"] = {{"subjects", samples.size()},
                 {"retained", emb.n()},
                 {"dimension", fit.chosen.d},
                 {"dim_converged", fit.dim_converged},
                 {"epsilon", fit.chosen.epsilon},
                 {"delta_fraction", fit.chosen.delta_fraction},
                 {"delta", fit.chosen.delta},
                 {"h", model.h},
                 {"cv_mspe", fit.chosen.cv.best_row().mspe},
                 {"fpca_K", fit.prelim.fpca.K},
                 {"fpca_score_method", score_method_name(fit.prelim.fpca.score_method)},
                 {"non_euclidean_ratio", emb.non_euclidean_ratio()}};
  run.finish();
  std::cout << "fit: " << samples.size() << " subjects, d=" << fit.chosen.d << (fit.dim_converged ? "" : " (FDE not converged)")
            << ", epsilon=" << num(fit.chosen.epsilon) << ", delta_fraction=" << num(fit.chosen.delta_fraction)
            << ", h=" << num(model.h) << ", CV MSPE=" << num(fit.chosen.cv.best_row().mspe) << "\n";
}

// ---- predict / modes / mean / scores -----------------------------------------

struct ModelFlags {
  std::string model, out_dir = ".";
};

void cmd_predict(const ModelFlags& f, bool loo, const std::string& truth_path) {
  const StoredModel s = load_model(f.model);
  if (!truth_path.empty() && !fs::exists(truth_path))
    throw Error("truth file '" + truth_path + "' does not exist");
  Run run("predict", f.out_dir);
  run.digest(f.model);

  const auto& mm = s.manifold;
  std::vector<GridFunction> preds;
  if (loo) {
    preds = predict_all_loo(mm, s.max_doublings);
  } else {
    for (std::size_t r = 0; r < mm.n(); ++r)
      preds.push_back(inverse_map(mm.embedding.coordinates.row(static_cast<Eigen::Index>(r)).transpose(), mm, s.max_doublings));
  }
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < mm.n(); ++r) ids.push_back(s.row_id(r));
  run.write("predictions.csv", grid_curves_csv(ids, preds));
  auto& m = run.manifest();
  m["loo"] = loo;
  m["predicted_subjects"] = ids.size();
  m["skipped_subjects"] = s.subject_ids.size() - ids.size();

  if (!truth_path.empty()) {
    run.digest(truth_path);
    const auto truth_samples = read_curves_csv(fs::path(truth_path));
    const auto truth_curves = curves_on_grid(truth_samples, s.grid);
    std::vector<GridFunction> t;
    for (const auto& id : ids) {
      auto it = std::find_if(truth_samples.begin(), truth_samples.end(), [&](const CurveSample& c) { return c.subject_id == id; });
      if (it == truth_samples.end()) throw Error("truth file has no curve for subject '" + id + "'");
      t.push_back(truth_curves[static_cast<std::size_t>(it - truth_samples.begin())]);
    }
    const double e = mspe(t, preds), r = rspe(t, preds);
    m["mspe"] = e;
    m["rspe"] = r;
    std::cout << "MSPE=" << num(e) << " RSPE=" << num(r) << " over " << ids.size() << " subjects\n";
  }
  run.finish();
}

void cmd_modes(const ModelFlags& f, std::size_t axis, const std::vector<double>& alphas) {
  const StoredModel s = load_model(f.model);
  const std::size_t d = s.manifold.d();
  if (axis > d) throw InvalidArgumentError("axis " + std::to_string(axis) + " exceeds the model dimension " + std::to_string(d));
  if (alphas.empty()) throw InvalidArgumentError("at least one alpha is required");
  Run run("modes", f.out_dir);
  run.digest(f.model);
  std::vector<std::size_t> axes;
  if (axis == 0)
    for (std::size_t j = 1; j <= d; ++j) axes.push_back(j);
  else
    axes.push_back(axis);

  std::ostringstream csv;
  csv << "axis,alpha,t,y\n";
  for (std::size_t j : axes) {
    Plot p;
    p.title = "Manifold mode " + std::to_string(j);
    p.x_label = "t";
    p.y_label = "X(t)";
    for (double a : alphas) {
      const GridFunction c = manifold_mode(j, a, s.manifold, s.max_doublings);
      for (std::size_t g = 0; g < c.size(); ++g) csv << j << ',' << num(a) << ',' << num(c.grid()[g]) << ',' << num(c[g]) << '\n';
      p.series.push_back(curve_series("alpha = " + num(a), c));
    }
    run.write("modes_axis" + std::to_string(j) + ".svg", render_svg(p));
  }
  run.write("modes.csv", csv.str());
  Json a = Json::array();
  for (double x : alphas) a.push_back(x);
  run.manifest()["alphas"] = a;
  run.manifest()["axes"] = axes;
  run.finish();
}

void cmd_mean(const ModelFlags& f) {
  const StoredModel s = load_model(f.model);
  Run run("mean", f.out_dir);
  run.digest(f.model);
  const GridFunction man = manifold_mean(s.manifold, s.max_doublings);
  const GridFunction cross = cross_sectional_mean(s.manifold.fitted_curves);
  std::ostringstream csv;
  csv << "t,manifold_mean,cross_sectional_mean,fpca_mean\n";
  for (std::size_t g = 0; g < man.size(); ++g)
    csv << num(man.grid()[g]) << ',' << num(man[g]) << ',' << num(cross[g]) << ',' << num(s.fpca.mean[g]) << '\n';
  run.write("mean.csv", csv.str());
  Plot p;
  p.title = "Mean curves";
  p.x_label = "t";
  p.y_label = "X(t)";
  p.series = {curve_series("manifold mean", man), curve_series("cross-sectional mean", cross)};
  run.write("mean.svg", render_svg(p));
  run.finish();
}

void cmd_scores(const ModelFlags& f) {
  const StoredModel s = load_model(f.model);
  Run run("scores", f.out_dir);
  run.digest(f.model);
  const auto sc = fmc_scores(s.manifold);
  std::ostringstream csv;
  csv << "subject_id";
  for (Eigen::Index k = 1; k <= sc.scores.cols(); ++k) csv << ",fmc_" << k;
  csv << '\n';
  for (std::size_t r = 0; r < s.manifold.n(); ++r) {
    csv << s.row_id(r);
    for (Eigen::Index k = 0; k < sc.scores.cols(); ++k) csv << ',' << num(sc.scores(static_cast<Eigen::Index>(r), k));
    csv << '\n';
  }
  run.write("scores.csv", csv.str());
  Json ev = Json::array();
  for (Eigen::Index k = 0; k < s.manifold.fmc_eigenvalues.size(); ++k) ev.push_back(s.manifold.fmc_eigenvalues(k));
  run.manifest()["fmc_eigenvalues"] = ev;
  run.finish();
}

// ---- simulate / benchmark ------------------------------------------------------

constexpr const char* kNoiseConvention =
    "sigma^2 = R * pooled empirical variance of the noiseless values at the sampling times";

void cmd_simulate(SimSpec spec, const fs::path& out_dir) {
  Run run("simulate", out_dir);
  const SimOutput sim = simulate(spec);
  std::ostringstream curves;
  curves << "subject_id,t,y\n";
  for (const auto& smp : sim.samples)
    for (std::size_t j = 0; j < smp.size(); ++j) curves << smp.subject_id << ',' << num(smp.times[j]) << ',' << num(smp.values[j]) << '\n';
  run.write("curves.csv", curves.str());
  std::vector<std::string> ids;
  for (const auto& smp : sim.samples) ids.push_back(smp.subject_id);
  run.write("truth.csv", grid_curves_csv(ids, sim.truth));
  std::ostringstream params;
  params << "subject_id,alpha,beta\n";
  for (std::size_t i = 0; i < sim.params.size(); ++i)
    params << ids[i] << ',' << num(sim.params[i][0]) << ','
           << (spec.manifold == ManifoldId::M1 ? std::string() : num(sim.params[i][1])) << '\n';
  run.write("params.csv", params.str());
  auto& m = run.manifest();
  m["config"] = {{"manifold", manifold_name(spec.manifold)}, {"n", spec.n},           {"points_per_curve", spec.points_per_curve},
                 {"R", spec.noise_ratio},                    {"grid_size", spec.grid_size}, {"lower", spec.lower},
                 {"upper", spec.upper}};
  m["seed"] = spec.seed;
  m["noise_convention"] = kNoiseConvention;
  m["sigma2"] = sim.sigma2;
  run.finish();
}

struct BenchFlags {
  int table = 1;
  std::vector<std::string> manifolds{"M1", "M2", "M3"};
  std::vector<double> ratios{0.1, 0.5};
  std::vector<int> knn{3, 5, 8, 12, 16};
  std::size_t n = 200, points = 30, grid_size = 101, max_dim = 5;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void cmd_benchmark(const BenchFlags& f, std::uint64_t seed) {
  if (f.table < 1 || f.table > 4) throw InvalidArgumentError("--table must be 1, 2, 3 or 4");
  std::vector<ManifoldId> ms;
  for (const auto& name : f.manifolds) ms.push_back(parse_manifold(name));
  BenchmarkOptions bo;
  bo.max_dim = f.max_dim;
  bo.fpca = f.table == 2;
  bo.manifold = f.table != 4;
  bo.isomap = f.table == 3;
  if (f.table == 4) bo.knn_presets = f.knn;

  Run run("benchmark", f.out_dir);
  std::map<std::pair<std::size_t, double>, BenchmarkResult> results;
  for (std::size_t a = 0; a < ms.size(); ++a)
    for (double R : f.ratios) {
      SimSpec spec;
      spec.manifold = ms[a];
      spec.n = f.n;
      spec.points_per_curve = f.points;
      spec.grid_size = f.grid_size;
      spec.noise_ratio = R;
      spec.seed = seed;
      BenchmarkOptions o = bo;
      if (f.table == 3) o.max_dim = intrinsic_dimension(ms[a]);
      results[{a, R}] = run_benchmark(spec, o);
    }

  auto cell = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? num(v[k]) : std::string("NA"); };
  std::ostringstream csv;
  if (f.table == 1) {
    csv << "manifold,R";
    for (std::size_t d = 1; d <= f.max_dim; ++d) csv << ",d" << d;
    csv << '\n';
    for (std::size_t a = 0; a < ms.size(); ++a)
      for (double R : f.ratios) {
        csv << manifold_name(ms[a]) << ',' << num(R);
        for (std::size_t d = 0; d < f.max_dim; ++d) csv << ',' << cell(results[{a, R}].fde, d);
        csv << '\n';
      }
  } else if (f.table == 2) {
    csv << "manifold,R,method";
    for (std::size_t d = 1; d <= f.max_dim; ++d) csv << ",mspe_" << d;
    for (std::size_t d = 1; d <= f.max_dim; ++d) csv << ",rspe_pct_" << d;
    csv << '\n';
    for (std::size_t a = 0; a < ms.size(); ++a)
      for (double R : f.ratios) {
        const auto& r = results[{a, R}];
        auto row = [&](const char* method, const std::vector<double>& e, const std::vector<double>& rel) {
          csv << manifold_name(ms[a]) << ',' << num(R) << ',' << method;
          for (std::size_t d = 0; d < f.max_dim; ++d) csv << ',' << cell(e, d);
          for (std::size_t d = 0; d < f.max_dim; ++d) csv << ',' << (d < rel.size() ? num(100.0 * rel[d]) : std::string("NA"));
          csv << '\n';
        };
        row("fpca", r.mspe_fpca, r.rspe_fpca);
        row("manifold", r.mspe_manifold, r.rspe_manifold);
      }
  } else if (f.table == 3) {
    csv << "R";
    for (auto m : ms) csv << ',' << manifold_name(m);
    csv << '\n';
    for (double R : f.ratios) {
      csv << num(R);
      for (std::size_t a = 0; a < ms.size(); ++a) csv << ',' << num(results[{a, R}].isomap_ratio);
      csv << '\n';
    }
  } else {
    csv << "manifold,R";
    for (int k : f.knn) csv << ",knn_" << k;
    csv << '\n';
    for (std::size_t a = 0; a < ms.size(); ++a)
      for (double R : f.ratios) {
        csv << manifold_name(ms[a]) << ',' << num(R);
        for (std::size_t k = 0; k < f.knn.size(); ++k) csv << ',' << cell(results[{a, R}].mspe_by_knn, k);
        csv << '\n';
      }
  }
  run.write("table" + std::to_string(f.table) + ".csv", csv.str());
  std::cout << csv.str();
  auto& m = run.manifest();
  Json ratios = Json::array();
  for (double R : f.ratios) ratios.push_back(R);
  m["config"] = {{"table", f.table}, {"manifolds", f.manifolds}, {"R", ratios}, {"n", f.n}, {"points_per_curve", f.points},
                 {"grid_size", f.grid_size}, {"max_dim", f.max_dim}, {"knn", f.knn}, {"fit", options_to_json(bo.fit)}};
  m["seed"] = seed;
  m["noise_convention"] = kNoiseConvention;
  run.finish();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional manifold component analysis"};
  app.set_version_flag("--version", FMCA_VERSION);
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker thread bound (0 = all cores)")->capture_default_str();

  FitFlags ff;
  auto* fit = app.add_subcommand("fit", "Fit the manifold model to a curve CSV");
  fit->add_option("--input,-i", ff.input, "Curve CSV with header subject_id,t,y")->required();
  fit->add_option("--out-dir,-o", ff.out_dir, "Output directory")->capture_default_str();
  fit->add_option("--config", ff.config, "JSON config; flags override its values");
  fit->add_option("--seed", ff.seed, "Fold-shuffling seed (fallback: FMCA_SEED)");
  fit->add_option("--dim", ff.dim, "Embedding dimension (0 = choose by FDE)");
  fit->add_option("--grid-size", ff.grid_size, "Working grid size");
  fit->add_option("--folds", ff.folds, "Cross-validation folds");
  fit->add_option("--h-count", ff.h_count, "Kernel bandwidth candidates");
  fit->add_option("--d-max", ff.d_max, "Largest dimension tried by FDE selection");
  fit->add_option("--kernel", ff.kernel, "Smoothing kernel: epanechnikov or gaussian");
  fit->add_option("--score-method", ff.score_method, "auto, integration or conditional");
  fit->add_option("--curve-source", ff.curve_source, "Preliminary curves: kl or presmooth");
  fit->add_option("--geodesic-length", ff.length, "Distances fed to MDS: unpenalized or penalized");
  fit->add_option("--fve-alpha", ff.fve_alpha, "FVE truncation level");
  fit->add_option("--beta", ff.beta, "FDE tolerance for dimension selection");
  fit->add_option("--max-disconnected", ff.max_disconnected, "Largest disconnected fraction allowed");
  fit->add_option("--epsilon-knn", ff.epsilon_knn, "Nearest-neighbor ranks for step-size candidates")->delimiter(',');
  fit->add_option("--epsilon", ff.epsilon_values, "Explicit step-size candidates")->delimiter(',');
  fit->add_option("--delta-fractions", ff.delta_fractions, "Penalized fractions")->delimiter(',');
  fit->add_option("--max-doublings", ff.max_doublings, "Bandwidth doublings on empty neighborhoods");

  ModelFlags pf;
  bool loo = false;
  std::string truth;
  auto* predict = app.add_subcommand("predict", "Predict every retained subject from a fitted model");
  predict->add_option("--model,-m", pf.model, "Model JSON written by fit")->required();
  predict->add_option("--out-dir,-o", pf.out_dir, "Output directory")->capture_default_str();
  predict->add_flag("--loo", loo, "Leave each subject out of its own kernel average");
  predict->add_option("--mspe-truth", truth, "Curve CSV of true curves; reports MSPE and RSPE");

  ModelFlags mf;
  std::size_t axis = 0;
  std::vector<double> alphas{-2, -1, 0, 1, 2};
  auto* modes = app.add_subcommand("modes", "Manifold modes of variation");
  modes->add_option("--model,-m", mf.model, "Model JSON written by fit")->required();
  modes->add_option("--out-dir,-o", mf.out_dir, "Output directory")->capture_default_str();
  modes->add_option("--axis", axis, "Component j (1-based; 0 = all)")->capture_default_str();
  modes->add_option("--alphas", alphas, "Mode multipliers")->delimiter(',')->capture_default_str();

  ModelFlags ef;
  auto* mean = app.add_subcommand("mean", "Manifold and cross-sectional means");
  mean->add_option("--model,-m", ef.model, "Model JSON written by fit")->required();
  mean->add_option("--out-dir,-o", ef.out_dir, "Output directory")->capture_default_str();

  ModelFlags sf;
  auto* scores = app.add_subcommand("scores", "Functional manifold component scores");
  scores->add_option("--model,-m", sf.model, "Model JSON written by fit")->required();
  scores->add_option("--out-dir,-o", sf.out_dir, "Output directory")->capture_default_str();

  SimSpec spec;
  std::string manifold;
  std::string sim_dir = ".";
  auto* sim = app.add_subcommand("simulate", "Generate noisy curves from M1, M2 or M3");
  sim->add_option("--manifold", manifold, "M1, M2 or M3")->required();
  sim->add_option("--n", spec.n, "Subjects")->capture_default_str();
  sim->add_option("--points", spec.points_per_curve, "Equally spaced points per curve")->capture_default_str();
  sim->add_option("--R", spec.noise_ratio, "Noise variance over pooled signal variance")->capture_default_str();
  sim->add_option("--grid-size", spec.grid_size, "Grid size of the truth curves")->capture_default_str();
  auto* sim_seed = sim->add_option("--seed", spec.seed, "Generator seed (fallback: FMCA_SEED)");
  sim->add_option("--out-dir,-o", sim_dir, "Output directory")->capture_default_str();

  BenchFlags bf;
  auto* bench = app.add_subcommand("benchmark", "Simulation benchmark tables");
  bench->add_option("--table", bf.table, "1 FDE, 2 MSPE/RSPE, 3 P-ISOMAP ratio, 4 step size")->required();
  bench->add_option("--manifolds", bf.manifolds, "Subset of M1,M2,M3")->delimiter(',');
  bench->add_option("--R", bf.ratios, "Noise ratios")->delimiter(',');
  bench->add_option("--knn", bf.knn, "Nearest-neighbor ranks for table 4")->delimiter(',');
  bench->add_option("--n", bf.n, "Subjects")->capture_default_str();
  bench->add_option("--points", bf.points, "Points per curve")->capture_default_str();
  bench->add_option("--grid-size", bf.grid_size, "Working grid size")->capture_default_str();
  bench->add_option("--max-dim", bf.max_dim, "Largest L and d reported")->capture_default_str();
  auto* bench_seed = bench->add_option("--seed", bf.seed, "Simulation and fold seed (fallback: FMCA_SEED)");
  bench->add_option("--out-dir,-o", bf.out_dir, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    set_max_threads(threads);
    if (*fit) cmd_fit(ff, *fit);
    if (*predict) cmd_predict(pf, loo, truth);
    if (*modes) cmd_modes(mf, axis, alphas);
    if (*mean) cmd_mean(ef);
    if (*scores) cmd_scores(sf);
    if (*sim) {
      spec.manifold = parse_manifold(manifold);
      spec.seed = resolve_seed(sim_seed, spec.seed, false, spec.seed);
      cmd_simulate(spec, sim_dir);
    }
    if (*bench) cmd_benchmark(bf, resolve_seed(bench_seed, bf.seed, false, bf.seed));
  } catch (const ParseError& e) {
    std::cerr << "fmca: parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fmca: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
