#include "fmca/serialize.hpp"

#include "fmca/error.hpp"

#include <cmath>
#include <limits>

namespace fmca {

namespace {

constexpr const char* kModelFormat = "fmca-model";
constexpr int kModelVersion = 1;

// NaN and infinities have no JSON spelling; they travel as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double to_double(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

Json vec(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json vec(const Eigen::VectorXd& v) { return vec(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))); }

std::vector<double> to_vec(const Json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(to_double(x));
  return out;
}

Eigen::VectorXd to_evec(const Json& j) {
  const auto v = to_vec(j);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Row-major nested arrays.
Json mat(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

Eigen::MatrixXd to_mat(const Json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols) throw ParseError("ragged matrix in model document", 0);
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = to_double(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
  }
  return m;
}

Json curves(std::span<const GridFunction> fs) {
  Json a = Json::array();
  for (const auto& f : fs) a.push_back(vec(f.values()));
  return a;
}

std::vector<GridFunction> to_curves(const Json& j, const GridPtr& grid) {
  std::vector<GridFunction> out;
  for (const auto& row : j) {
    auto v = to_vec(row);
    if (v.size() != grid->size()) throw GridMismatchError("stored curve length differs from the grid");
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

template <class T>
void take(const Json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

} // namespace

Json fpca_to_json(const FpcaModel& m) {
  Json j;
  j["grid"] = vec(m.grid().points());
  j["mean"] = vec(m.mean.values());
  j["eigenvalues"] = vec(m.eigenvalues);
  j["eigenfunctions"] = curves(m.eigenfunctions);
  j["total_variance"] = m.total_variance;
  j["sigma2"] = m.sigma2;
  j["K"] = m.K;
  j["h_mean"] = m.h_mean;
  j["h_cov"] = m.h_cov;
  j["kernel"] = kernel_name(m.kernel);
  j["score_method"] = score_method_name(m.score_method);
  j["subject_ids"] = m.subject_ids;
  j["scores"] = mat(m.scores);
  return j;
}

FpcaModel fpca_from_json(const Json& doc, GridPtr grid) {
  try {
    if (!grid) grid = std::make_shared<const Grid>(to_vec(doc.at("grid")));
    FpcaModel m;
    auto mean = to_vec(doc.at("mean"));
    if (mean.size() != grid->size()) throw GridMismatchError("stored mean length differs from the grid");
    m.mean = GridFunction(grid, std::move(mean));
    m.eigenvalues = to_vec(doc.at("eigenvalues"));
    m.eigenfunctions = to_curves(doc.at("eigenfunctions"), grid);
    if (m.eigenfunctions.size() != m.eigenvalues.size()) throw ParseError("eigenvalue/eigenfunction count mismatch", 0);
    m.total_variance = doc.at("total_variance").get<double>();
    m.sigma2 = doc.at("sigma2").get<double>();
    m.K = doc.at("K").get<std::size_t>();
    m.h_mean = doc.at("h_mean").get<double>();
    m.h_cov = doc.at("h_cov").get<double>();
    m.kernel = parse_kernel(doc.at("kernel").get<std::string>());
    m.score_method = parse_score_method(doc.at("score_method").get<std::string>());
    m.subject_ids = doc.at("subject_ids").get<std::vector<std::string>>();
    m.scores = to_mat(doc.at("scores"), static_cast<Eigen::Index>(m.components()));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed FPCA document: ") + e.what(), 0);
  }
}

Json model_to_json(const FitResult& fit, const FitOptions& options) {
  const auto& model = fit.chosen.model;
  const auto& emb = model.embedding;
  Json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["subject_ids"] = fit.subject_ids;
  j["fpca"] = fpca_to_json(fit.prelim.fpca);

  Json sel;
  sel["dimension"] = fit.chosen.d;
  sel["dim_converged"] = fit.dim_converged;
  sel["fde_by_dim"] = vec(fit.fde_by_dim);
  sel["epsilon"] = fit.chosen.epsilon;
  sel["delta_fraction"] = fit.chosen.delta_fraction;
  sel["delta"] = fit.chosen.delta;
  sel["h"] = model.h;
  sel["epsilon_candidates"] = vec(fit.epsilon_candidates);
  Json excluded = Json::array();
  for (std::size_t i : fit.excluded) excluded.push_back(fit.subject_ids[i]);
  sel["excluded"] = std::move(excluded);
  sel["max_doublings"] = options.max_doublings;
  j["selection"] = std::move(sel);

  Json man;
  man["coordinates"] = mat(emb.coordinates);
  man["source_indices"] = emb.source_indices;
  man["mds_eigenvalues"] = vec(emb.eigenvalues);
  man["padded"] = emb.padded;
  man["fitted_curves"] = curves(model.fitted_curves);
  man["mean_coords"] = vec(model.mean_coords);
  man["fmc_eigenvalues"] = vec(model.fmc_eigenvalues);
  man["fmc_vectors"] = mat(model.fmc_vectors);
  j["manifold"] = std::move(man);
  return j;
}

StoredModel model_from_json(const Json& doc) {
  try {
    if (doc.value("format", std::string()) != kModelFormat) throw ParseError("not a model document", 0);
    if (doc.at("version").get<int>() != kModelVersion) throw ParseError("unsupported model version", 0);
    StoredModel s;
    s.fpca = fpca_from_json(doc.at("fpca"));
    s.grid = s.fpca.grid_ptr();
    s.subject_ids = doc.at("subject_ids").get<std::vector<std::string>>();

    const auto& sel = doc.at("selection");
    s.epsilon = sel.at("epsilon").get<double>();
    s.delta_fraction = sel.at("delta_fraction").get<double>();
    s.delta = sel.at("delta").get<double>();
    s.fde_by_dim = to_vec(sel.at("fde_by_dim"));
    s.dim_converged = sel.at("dim_converged").get<bool>();
    s.max_doublings = sel.at("max_doublings").get<int>();
    const auto d = sel.at("dimension").get<Eigen::Index>();

    const auto& man = doc.at("manifold");
    Embedding emb;
    emb.coordinates = to_mat(man.at("coordinates"), d);
    emb.source_indices = man.at("source_indices").get<std::vector<std::size_t>>();
    emb.eigenvalues = to_vec(man.at("mds_eigenvalues"));
    emb.padded = man.at("padded").get<bool>();
    if (emb.source_indices.size() != emb.n()) throw ParseError("embedding rows and source indices disagree", 0);
    for (std::size_t i : emb.source_indices)
      if (i >= s.subject_ids.size()) throw ParseError("embedding source index out of range", 0);

    s.manifold.embedding = std::move(emb);
    s.manifold.fitted_curves = to_curves(man.at("fitted_curves"), s.grid);
    if (s.manifold.fitted_curves.size() != s.manifold.embedding.n()) throw ParseError("one fitted curve per embedding row required", 0);
    s.manifold.h = sel.at("h").get<double>();
    s.manifold.mean_coords = to_evec(man.at("mean_coords"));
    s.manifold.fmc_eigenvalues = to_evec(man.at("fmc_eigenvalues"));
    s.manifold.fmc_vectors = to_mat(man.at("fmc_vectors"), d);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what(), 0);
  }
}

Json options_to_json(const FitOptions& o) {
  Json j;
  j["grid_size"] = o.grid_size;
  j["kernel"] = kernel_name(o.fpca.kernel);
  j["h_mean"] = o.fpca.h_mean;
  j["h_cov"] = o.fpca.h_cov;
  j["bandwidth_candidates"] = o.fpca.bandwidth_candidates;
  j["fve_alpha"] = o.fpca.fve_alpha;
  j["score_method"] = score_method_name(o.fpca.score_method);
  j["max_components"] = o.fpca.max_components;
  j["curve_source"] = curve_source_name(o.curve_source);
  j["h_presmooth"] = o.h_presmooth;
  j["epsilon_knn"] = o.epsilon_knn;
  j["epsilon_values"] = o.epsilon_values;
  j["delta_fractions"] = o.delta_fractions;
  j["h_count"] = o.h_count;
  j["folds"] = o.folds;
  j["seed"] = o.seed;
  j["dim"] = o.dim;
  j["beta"] = o.beta;
  j["d_max"] = o.d_max;
  j["max_disconnected_fraction"] = o.max_disconnected_fraction;
  j["geodesic_length"] = geodesic_length_name(o.length);
  j["max_doublings"] = o.max_doublings;
  return j;
}

void apply_options_json(const Json& doc, FitOptions& o) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 0);
  const Json known = options_to_json(o);
  for (const auto& [key, _] : doc.items())
    if (!known.contains(key)) throw InvalidArgumentError("unknown config key '" + key + "'");
  try {
    take(doc, "grid_size", o.grid_size);
    if (doc.contains("kernel")) o.fpca.kernel = parse_kernel(doc.at("kernel").get<std::string>());
    take(doc, "h_mean", o.fpca.h_mean);
    take(doc, "h_cov", o.fpca.h_cov);
    take(doc, "bandwidth_candidates", o.fpca.bandwidth_candidates);
    take(doc, "fve_alpha", o.fpca.fve_alpha);
    if (doc.contains("score_method")) o.fpca.score_method = parse_score_method(doc.at("score_method").get<std::string>());
    take(doc, "max_components", o.fpca.max_components);
    if (doc.contains("curve_source")) o.curve_source = parse_curve_source(doc.at("curve_source").get<std::string>());
    take(doc, "h_presmooth", o.h_presmooth);
    take(doc, "epsilon_knn", o.epsilon_knn);
    take(doc, "epsilon_values", o.epsilon_values);
    take(doc, "delta_fractions", o.delta_fractions);
    take(doc, "h_count", o.h_count);
    take(doc, "folds", o.folds);
    take(doc, "seed", o.seed);
    take(doc, "dim", o.dim);
    take(doc, "beta", o.beta);
    take(doc, "d_max", o.d_max);
    take(doc, "max_disconnected_fraction", o.max_disconnected_fraction);
    if (doc.contains("geodesic_length")) o.length = parse_geodesic_length(doc.at("geodesic_length").get<std::string>());
    take(doc, "max_doublings", o.max_doublings);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what(), 0);
  }
}

} // namespace fmca
