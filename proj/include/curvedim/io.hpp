#pragma once

#include "curvedim/panel.hpp"

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace curvedim {

struct IngestedPanel {
  CurvePanel panel;
  bool resampled = false;
  std::size_t source_grid_size = 0;
};

/// Curves in CSV form: the first row holds the grid abscissae, every further
/// row one curve, in time order. Blank lines are ignored.
[[nodiscard]] IngestedPanel read_curves_csv(std::istream& in, int min_curves = 1);

/// Throws Io if the file cannot be opened, TooFewCurves if it holds fewer than
/// `min_curves` curves (the pipeline needs n >= p + 2).
[[nodiscard]] IngestedPanel ingest_curves(const std::filesystem::path& path, int min_curves = 1);

/// Piecewise-linear resampling of curves on the uniform grid `grid` onto
/// `target` equally spaced points spanning [grid.front(), grid.back()].
[[nodiscard]] CurvePanel resample_linear(const std::vector<double>& grid, const RowMatrix& values,
                                         std::size_t target);

void write_curves_csv(std::ostream& out, const CurvePanel& panel);

/// Writes to a temporary file in the target directory and renames it over
/// `path`. "-" writes to standard output.
void write_output(const std::string& path, std::string_view content);

}  // namespace curvedim
