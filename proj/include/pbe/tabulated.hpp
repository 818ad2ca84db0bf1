#pragma once

#include <string>
#include <vector>

namespace pbe {

/// Numeric CSV content. Blank lines, '#' comments and a non-numeric header row are skipped.
std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t columns);

/// Piecewise-linear function of mass with strictly increasing abscissae.
/// Outside the tabulated range the end values are held constant.
class Table1D {
public:
  Table1D() = default;
  Table1D(std::vector<double> x, std::vector<double> y);

  static Table1D from_csv(const std::string& path);

  double operator()(double x) const;

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  double min_value() const;

private:
  std::vector<double> x_, y_;
};

/// Bilinear interpolation on a tensor grid (xs outer, ys inner), clamped at the edges.
/// CSV rows are (x, y, value) and must enumerate the full tensor product in that order.
class Table2D {
public:
  Table2D() = default;
  Table2D(std::vector<double> xs, std::vector<double> ys, std::vector<double> values);

  static Table2D from_csv(const std::string& path);

  double operator()(double x, double y) const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  double min_value() const;

private:
  std::vector<double> xs_, ys_, values_; // row-major in xs
};

} // namespace pbe
