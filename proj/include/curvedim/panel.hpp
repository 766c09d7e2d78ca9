#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace curvedim {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n curves sampled on a shared uniform grid x_i = a + i*dx, i < N, with
/// dx = (b - a) / N. Each row of `values` is one curve, rows in time order.
struct CurvePanel {
  std::vector<double> grid;
  RowMatrix values;
  double a = 0.0;
  double b = 1.0;

  [[nodiscard]] std::size_t curve_count() const { return static_cast<std::size_t>(values.rows()); }
  [[nodiscard]] std::size_t grid_size() const { return grid.size(); }
  [[nodiscard]] double spacing() const { return (b - a) / static_cast<double>(grid.size()); }
};

[[nodiscard]] bool is_power_of_two(std::size_t n) noexcept;
[[nodiscard]] int log2_exact(std::size_t n) noexcept;

/// N points a + i*(b-a)/N.
[[nodiscard]] std::vector<double> uniform_grid(double a, double b, std::size_t n);

/// Checks the panel invariants (finite values, matching shapes, uniform
/// dyadic grid). Throws Error on violation.
void validate_panel(const CurvePanel& panel);

/// Panel with the given curves on uniform_grid(a, b, values.cols()).
[[nodiscard]] CurvePanel make_panel(RowMatrix values, double a = 0.0, double b = 1.0);

/// Periodic trapezoid rule on the panel grid: dx * sum_i f_i g_i.
[[nodiscard]] double grid_inner_product(std::span<const double> f, std::span<const double> g, double dx);

}  // namespace curvedim
