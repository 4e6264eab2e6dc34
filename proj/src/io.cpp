#include "fmca/io.hpp"

#include "fmca/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fmca {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line, const char* what) {
  // from_chars for double is unavailable on some standard libraries; strtod is locale-bound
  // but the C locale is never changed here.
  std::string buf(field);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) throw ParseError(std::string("invalid ") + what + " '" + buf + "'", line);
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what, line);
  return v;
}

} // namespace

std::vector<CurveSample> read_curves_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cols = split(line);
    if (cols.size() != 3 || cols[0] != "subject_id" || cols[1] != "t" || cols[2] != "y")
      throw ParseError("expected header 'subject_id,t,y'", lineno);
    header = true;
    break;
  }
  if (!header) throw ParseError("empty input: missing header", std::max<std::size_t>(lineno, 1));

  std::vector<CurveSample> samples;
  std::map<std::string, std::size_t, std::less<>> index;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cols = split(line);
    if (cols.size() != 3) throw ParseError("expected 3 columns, found " + std::to_string(cols.size()), lineno);
    if (cols[0].empty()) throw ParseError("empty subject_id", lineno);
    const double t = parse_number(cols[1], lineno, "time");
    const double y = parse_number(cols[2], lineno, "value");
    auto it = index.find(cols[0]);
    if (it == index.end()) {
      it = index.emplace(std::string(cols[0]), samples.size()).first;
      samples.push_back(CurveSample{std::string(cols[0]), {}, {}});
    }
    samples[it->second].times.push_back(t);
    samples[it->second].values.push_back(y);
  }
  if (samples.empty()) throw ParseError("no data rows", lineno);
  for (auto& s : samples) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.times[a] < s.times[b]; });
    CurveSample sorted{s.subject_id, {}, {}};
    for (std::size_t k : order) {
      sorted.times.push_back(s.times[k]);
      sorted.values.push_back(s.values[k]);
    }
    s = std::move(sorted);
  }
  return samples;
}

std::vector<CurveSample> read_curves_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_curves_csv(in);
}

void write_curves_csv(std::ostream& out, std::span<const CurveSample> samples) {
  const auto old = out.precision(17);
  out << "subject_id,t,y\n";
  for (const auto& s : samples)
    for (std::size_t j = 0; j < s.size(); ++j) out << s.subject_id << ',' << s.times[j] << ',' << s.values[j] << '\n';
  out.precision(old);
}

void write_grid_curves_csv(std::ostream& out, std::span<const std::string> ids, std::span<const GridFunction> curves) {
  if (ids.size() != curves.size()) throw InvalidArgumentError("one id per curve required");
  const auto old = out.precision(17);
  out << "subject_id,t,y\n";
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t g = 0; g < curves[i].size(); ++g)
      out << ids[i] << ',' << curves[i].grid()[g] << ',' << curves[i][g] << '\n';
  out.precision(old);
}

std::vector<GridFunction> curves_on_grid(std::span<const CurveSample> samples, const GridPtr& grid) {
  std::vector<GridFunction> out;
  for (const auto& s : samples) {
    s.validate();
    std::vector<double> v(grid->size());
    for (std::size_t g = 0; g < grid->size(); ++g) {
      const double t = (*grid)[g];
      auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
      if (it == s.times.begin()) {
        v[g] = s.values.front();
      } else if (it == s.times.end()) {
        v[g] = s.values.back();
      } else {
        const auto k = static_cast<std::size_t>(it - s.times.begin());
        const double w = s.times[k] == s.times[k - 1] ? 1.0 : (t - s.times[k - 1]) / (s.times[k] - s.times[k - 1]);
        v[g] = (1.0 - w) * s.values[k - 1] + w * s.values[k];
      }
    }
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

} // namespace fmca
