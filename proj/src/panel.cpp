#include "curvedim/panel.hpp"

#include "curvedim/error.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace curvedim {

bool is_power_of_two(std::size_t n) noexcept { return std::has_single_bit(n); }

int log2_exact(std::size_t n) noexcept { return static_cast<int>(std::bit_width(n)) - 1; }

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  std::vector<double> grid(n);
  const double dx = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = a + static_cast<double>(i) * dx;
  return grid;
}

void validate_panel(const CurvePanel& panel) {
  const std::size_t n = panel.grid.size();
  if (!(panel.b > panel.a)) throw Error(Errc::NonUniformGrid, "interval must satisfy b > a");
  if (static_cast<std::size_t>(panel.values.cols()) != n) {
    throw Error(Errc::LayoutMismatch, "curve length " + std::to_string(panel.values.cols()) +
                                          " does not match grid length " + std::to_string(n));
  }
  if (!is_power_of_two(n)) throw Error(Errc::GridNotDyadic, "grid length " + std::to_string(n) + " is not a power of two");
  const double dx = panel.spacing();
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = panel.a + static_cast<double>(i) * dx;
    if (std::abs(panel.grid[i] - expected) > 1e-8 * dx) {
      throw Error(Errc::NonUniformGrid, "grid point " + std::to_string(i) + " is off the uniform grid");
    }
  }
  if (!panel.values.allFinite()) throw Error(Errc::MalformedCsv, "curve values must be finite");
}

CurvePanel make_panel(RowMatrix values, double a, double b) {
  CurvePanel panel;
  panel.grid = uniform_grid(a, b, static_cast<std::size_t>(values.cols()));
  panel.values = std::move(values);
  panel.a = a;
  panel.b = b;
  return panel;
}

double grid_inner_product(std::span<const double> f, std::span<const double> g, double dx) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return acc * dx;
}

}  // namespace curvedim
