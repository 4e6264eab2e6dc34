#pragma once

#include "fmca/fpca.hpp"
#include "fmca/manifold.hpp"
#include "fmca/pipeline.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fmca {

using Json = nlohmann::ordered_json;

Json fpca_to_json(const FpcaModel& model);
/// Rebuilds the model; the grid is taken from the document unless `grid` is given.
FpcaModel fpca_from_json(const Json& doc, GridPtr grid = nullptr);

/// Everything the predict/modes/mean/scores commands need from a fit.
struct StoredModel {
  GridPtr grid;
  std::vector<std::string> subject_ids; // all input subjects, input order
  FpcaModel fpca;
  ManifoldModel manifold;               // rows follow manifold.embedding.source_indices
  double epsilon = 0.0;
  double delta_fraction = 0.0;
  double delta = 0.0;
  std::vector<double> fde_by_dim;
  bool dim_converged = true;
  int max_doublings = 3;

  /// Subject id of embedding row r.
  const std::string& row_id(std::size_t r) const { return subject_ids[manifold.embedding.source_indices[r]]; }
};

Json model_to_json(const FitResult& fit, const FitOptions& options);
StoredModel model_from_json(const Json& doc);

Json options_to_json(const FitOptions& options);
/// Overlays the keys present in `doc` on `options`; unknown keys are rejected.
void apply_options_json(const Json& doc, FitOptions& options);

} // namespace fmca
