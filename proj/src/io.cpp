#include "curvedim/io.hpp"

#include "curvedim/error.hpp"
#include "curvedim/format.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <system_error>

namespace curvedim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string_view field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
      throw Error(Errc::MalformedCsv, "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(Errc::MalformedCsv, "line " + std::to_string(line_no) + ": non-finite value");
    }
    row.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

double check_uniform(const std::vector<double>& grid) {
  if (grid.size() < 2) throw Error(Errc::MalformedCsv, "grid row needs at least two abscissae");
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) throw Error(Errc::NonUniformGrid, "grid must be strictly increasing");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs((grid[i] - grid[i - 1]) - h) > 1e-8 * h) {
      throw Error(Errc::NonUniformGrid, "grid spacing at point " + std::to_string(i) + " deviates from " +
                                            format_number(h));
    }
  }
  return h;
}

}  // namespace

CurvePanel resample_linear(const std::vector<double>& grid, const RowMatrix& values, std::size_t target) {
  if (grid.size() < 2 || static_cast<std::size_t>(values.cols()) != grid.size() || target < 2) {
    throw Error(Errc::LayoutMismatch, "resampling needs matching grid and curves");
  }
  const double x0 = grid.front();
  const double step = (grid.back() - x0) / static_cast<double>(target - 1);
  CurvePanel out;
  out.grid.resize(target);
  out.values.resize(values.rows(), static_cast<Eigen::Index>(target));
  for (std::size_t i = 0; i < target; ++i) {
    const double x = i + 1 == target ? grid.back() : x0 + static_cast<double>(i) * step;
    out.grid[i] = x;
    auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin());
    hi = std::clamp<std::size_t>(hi, 1, grid.size() - 1);
    const std::size_t lo = hi - 1;
    const double w = (x - grid[lo]) / (grid[hi] - grid[lo]);
    out.values.col(static_cast<Eigen::Index>(i)) =
        (1.0 - w) * values.col(static_cast<Eigen::Index>(lo)) + w * values.col(static_cast<Eigen::Index>(hi));
  }
  out.a = x0;
  out.b = x0 + static_cast<double>(target) * step;
  return out;
}

IngestedPanel read_curves_csv(std::istream& in, int min_curves) {
  std::vector<double> grid;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::vector<double> row = parse_row(body, line_no);
    if (grid.empty()) {
      grid = std::move(row);
      continue;
    }
    if (row.size() != grid.size()) {
      throw Error(Errc::MalformedCsv, "line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                                          " values, the grid has " + std::to_string(grid.size()));
    }
    rows.push_back(std::move(row));
  }
  if (grid.empty()) throw Error(Errc::MalformedCsv, "input is empty");
  const double h = check_uniform(grid);
  if (rows.size() < static_cast<std::size_t>(std::max(min_curves, 1))) {
    throw Error(Errc::TooFewCurves, "found " + std::to_string(rows.size()) + " curves, need at least " +
                                        std::to_string(std::max(min_curves, 1)));
  }

  RowMatrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    std::copy(rows[t].begin(), rows[t].end(), values.row(static_cast<Eigen::Index>(t)).begin());
  }

  IngestedPanel out;
  out.source_grid_size = grid.size();
  if (is_power_of_two(grid.size())) {
    out.panel.a = grid.front();
    out.panel.b = grid.front() + static_cast<double>(grid.size()) * h;
    out.panel.grid = std::move(grid);
    out.panel.values = std::move(values);
  } else {
    out.panel = resample_linear(grid, values, std::bit_ceil(grid.size()));
    out.resampled = true;
  }
  validate_panel(out.panel);
  return out;
}

IngestedPanel ingest_curves(const std::filesystem::path& path, int min_curves) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return read_curves_csv(in, min_curves);
}

void write_curves_csv(std::ostream& out, const CurvePanel& panel) {
  auto write_row = [&out](auto&& row) {
    bool first = true;
    for (double v : row) {
      if (!first) out << ',';
      out << format_number(v);
      first = false;
    }
    out << '\n';
  };
  write_row(panel.grid);
  for (Eigen::Index t = 0; t < panel.values.rows(); ++t) write_row(panel.values.row(t));
}

void write_output(const std::string& path, std::string_view content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::Io, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::Io, "cannot move report into place at " + path);
  }
}

}  // namespace curvedim
