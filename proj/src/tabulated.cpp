#include "pbe/tabulated.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pbe/errors.hpp"

namespace pbe {

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    if (first == std::string::npos) return false;
    const auto last = cell.find_last_not_of(" \t\r");
    cell = cell.substr(first, last - first + 1);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE) return false;
    out.push_back(v);
  }
  return !out.empty();
}

void require_increasing(const std::vector<double>& v, const std::string& what) {
  if (v.size() < 2) throw ConfigError(what + ": need at least two mass coordinates");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError(what + ": mass coordinates must be strictly increasing");
}

// index i with xs[i] <= x < xs[i+1] and the linear weight of xs[i+1]
std::pair<std::size_t, double> bracket(const std::vector<double>& xs, double x) {
  if (x <= xs.front()) return {0, 0.0};
  if (x >= xs.back()) return {xs.size() - 2, 1.0};
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  return {i, (x - xs[i]) / (xs[i + 1] - xs[i])};
}

} // namespace

std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table '" + path + "'");
  std::vector<std::vector<double>> cols(columns);
  std::string line;
  std::vector<double> row;
  bool first_content = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    if (!parse_row(line, row)) {
      if (first_content) { // header
        first_content = false;
        continue;
      }
      throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed numeric row");
    }
    first_content = false;
    if (row.size() != columns)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " columns");
    for (std::size_t c = 0; c < columns; ++c) cols[c].push_back(row[c]);
  }
  return cols;
}

Table1D::Table1D(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw ConfigError("Table1D: column length mismatch");
  require_increasing(x_, "Table1D");
}

Table1D Table1D::from_csv(const std::string& path) {
  auto cols = read_csv_columns(path, 2);
  return Table1D(std::move(cols[0]), std::move(cols[1]));
}

double Table1D::operator()(double x) const {
  const auto [i, w] = bracket(x_, x);
  return (1.0 - w) * y_[i] + w * y_[i + 1];
}

double Table1D::min_value() const { return *std::min_element(y_.begin(), y_.end()); }

Table2D::Table2D(std::vector<double> xs, std::vector<double> ys, std::vector<double> values)
    : xs_(std::move(xs)), ys_(std::move(ys)), values_(std::move(values)) {
  require_increasing(xs_, "Table2D x");
  require_increasing(ys_, "Table2D y");
  if (values_.size() != xs_.size() * ys_.size()) throw ConfigError("Table2D: value count mismatch");
}

Table2D Table2D::from_csv(const std::string& path) {
  auto cols = read_csv_columns(path, 3);
  std::vector<double> xs, ys;
  for (double x : cols[0])
    if (xs.empty() || x != xs.back()) xs.push_back(x);
  if (xs.empty()) throw ConfigError(path + ": empty table");
  const std::size_t ny = cols[0].size() / xs.size();
  if (ny * xs.size() != cols[0].size())
    throw ConfigError(path + ": rows do not form a full tensor grid");
  ys.assign(cols[1].begin(), cols[1].begin() + static_cast<std::ptrdiff_t>(ny));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t r = i * ny + j;
      if (cols[0][r] != xs[i] || cols[1][r] != ys[j])
        throw ConfigError(path + ": rows do not form a full tensor grid (x outer, y inner)");
    }
  return Table2D(std::move(xs), std::move(ys), std::move(cols[2]));
}

double Table2D::operator()(double x, double y) const {
  const auto [i, wx] = bracket(xs_, x);
  const auto [j, wy] = bracket(ys_, y);
  const std::size_t ny = ys_.size();
  const double v00 = values_[i * ny + j], v01 = values_[i * ny + j + 1];
  const double v10 = values_[(i + 1) * ny + j], v11 = values_[(i + 1) * ny + j + 1];
  return (1.0 - wx) * ((1.0 - wy) * v00 + wy * v01) + wx * ((1.0 - wy) * v10 + wy * v11);
}

double Table2D::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

} // namespace pbe
