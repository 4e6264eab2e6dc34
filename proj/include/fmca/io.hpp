#pragma once

#include "fmca/grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fmca {

/// Long-format curve CSV: header "subject_id,t,y", one row per measurement.
/// Subjects keep their first-appearance order; rows within a subject are sorted by t.
std::vector<CurveSample> read_curves_csv(std::istream& in);
std::vector<CurveSample> read_curves_csv(const std::filesystem::path& path);

void write_curves_csv(std::ostream& out, std::span<const CurveSample> samples);

/// Grid-valued curves in the same long format, one row per grid point.
void write_grid_curves_csv(std::ostream& out, std::span<const std::string> ids, std::span<const GridFunction> curves);

/// Reads long-format curves and interpolates each subject onto `grid`.
std::vector<GridFunction> curves_on_grid(std::span<const CurveSample> samples, const GridPtr& grid);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace fmca
