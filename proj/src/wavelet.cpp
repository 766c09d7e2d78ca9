#include "curvedim/wavelet.hpp"

#include "curvedim/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace curvedim {

CoefficientLayout::CoefficientLayout(int j0, int jmax) : j0_(j0), jmax_(jmax) {
  if (j0 < 0 || j0 > jmax || jmax > 30) {
    throw Error(Errc::BadLevels, "need 0 <= j0 <= jmax, got j0=" + std::to_string(j0) +
                                     ", jmax=" + std::to_string(jmax));
  }
}

CoefficientLayout::Block CoefficientLayout::approximation() const noexcept {
  return {j0_, true, 0, std::size_t{1} << j0_};
}

CoefficientLayout::Block CoefficientLayout::detail(int level) const {
  if (level < j0_ || level > jmax_) throw Error(Errc::LayoutMismatch, "detail level out of range");
  // approximation (2^j0) plus details j0..level-1 sum to 2^level
  return {level, false, std::size_t{1} << level, std::size_t{1} << level};
}

std::vector<CoefficientLayout::Block> CoefficientLayout::blocks() const {
  std::vector<Block> out{approximation()};
  for (int j = j0_; j <= jmax_; ++j) out.push_back(detail(j));
  return out;
}

std::size_t CoefficientLayout::approximation_row(std::size_t shift) const {
  if (shift >= approximation().count) throw Error(Errc::LayoutMismatch, "approximation shift out of range");
  return shift;
}

std::size_t CoefficientLayout::detail_row(int level, std::size_t shift) const {
  const Block blk = detail(level);
  if (shift >= blk.count) throw Error(Errc::LayoutMismatch, "detail shift out of range");
  return blk.offset + shift;
}

WaveletSystem build_wavelet_system(int order, int j0, int jmax) {
  const std::span<const double> taps = daubechies_filter(order);
  const CoefficientLayout layout(j0, jmax);  // validates levels
  WaveletSystem sys;
  sys.order = order;
  sys.j0 = layout.j0();
  sys.jmax = layout.jmax();
  sys.h.assign(taps.begin(), taps.end());
  const std::size_t len = sys.h.size();
  sys.g.resize(len);
  for (std::size_t n = 0; n < len; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    sys.g[n] = sign * sys.h[len - 1 - n];
  }
  return sys;
}

int parse_wavelet_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  std::string_view digits;
  if (lower.starts_with("daub")) {
    digits = std::string_view(lower).substr(4);
  } else if (lower.starts_with("db")) {
    digits = std::string_view(lower).substr(2);
  } else {
    throw Error(Errc::UnsupportedFamily, "unknown wavelet family '" + std::string(name) + "'");
  }
  if (digits.empty() || digits.size() > 2 ||
      !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(Errc::UnsupportedFamily, "unknown wavelet family '" + std::string(name) + "'");
  }
  const int order = std::stoi(std::string(digits));
  (void)daubechies_filter(order);
  return order;
}

namespace {

void check_grid(const WaveletSystem& sys, std::size_t grid_size) {
  if (!is_power_of_two(grid_size)) {
    throw Error(Errc::GridNotDyadic, "grid length " + std::to_string(grid_size) + " is not a power of two");
  }
  if (grid_size < (std::size_t{1} << (sys.jmax + 1))) {
    throw Error(Errc::BadLevels, "jmax=" + std::to_string(sys.jmax) + " needs at least " +
                                     std::to_string(std::size_t{1} << (sys.jmax + 1)) + " grid points, got " +
                                     std::to_string(grid_size));
  }
}

// One analysis step on a periodic signal of even length: x -> (approx, detail).
void analysis_step(std::span<const double> x, std::span<double> approx, std::span<double> detail,
                   const WaveletSystem& sys) {
  const std::size_t len = x.size();
  const std::size_t taps = sys.h.size();
  for (std::size_t k = 0; k < len / 2; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t n = 0; n < taps; ++n) {
      const double v = x[(2 * k + n) % len];
      a += sys.h[n] * v;
      d += sys.g[n] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

// Adjoint of analysis_step; x must be zeroed by the caller.
void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<double> x,
                    const WaveletSystem& sys) {
  const std::size_t len = x.size();
  const std::size_t taps = sys.h.size();
  for (std::size_t k = 0; k < len / 2; ++k) {
    const double a = approx[k];
    const double d = detail.empty() ? 0.0 : detail[k];
    for (std::size_t n = 0; n < taps; ++n) x[(2 * k + n) % len] += sys.h[n] * a + sys.g[n] * d;
  }
}

}  // namespace

std::vector<double> forward_dwt(std::span<const double> samples, const WaveletSystem& sys) {
  check_grid(sys, samples.size());
  const CoefficientLayout layout = sys.layout();
  const int top = log2_exact(samples.size());

  std::vector<double> out(layout.size(), 0.0);
  std::vector<double> current(samples.begin(), samples.end());
  std::vector<double> approx;
  std::vector<double> detail;
  for (int j = top - 1; j >= sys.j0; --j) {
    const std::size_t half = std::size_t{1} << j;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    analysis_step(current, approx, detail, sys);
    if (j <= sys.jmax) std::copy(detail.begin(), detail.end(), out.begin() + static_cast<std::ptrdiff_t>(layout.detail(j).offset));
    current.swap(approx);
  }
  std::copy(current.begin(), current.end(), out.begin());
  return out;
}

std::vector<double> inverse_dwt(std::span<const double> coeffs, const WaveletSystem& sys, std::size_t grid_size) {
  check_grid(sys, grid_size);
  const CoefficientLayout layout = sys.layout();
  if (coeffs.size() != layout.size()) {
    throw Error(Errc::LayoutMismatch, "expected " + std::to_string(layout.size()) + " coefficients, got " +
                                          std::to_string(coeffs.size()));
  }
  const int top = log2_exact(grid_size);
  const auto approx_blk = layout.approximation();
  std::vector<double> current(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(approx_blk.count));
  std::vector<double> next;
  for (int j = sys.j0; j < top; ++j) {
    next.assign(std::size_t{1} << (j + 1), 0.0);
    std::span<const double> detail;
    if (j <= sys.jmax) {
      const auto blk = layout.detail(j);
      detail = coeffs.subspan(blk.offset, blk.count);
    }
    synthesis_step(current, detail, next, sys);
    current.swap(next);
  }
  return current;
}

CoefficientPanel decompose(const CurvePanel& panel, const WaveletSystem& sys) {
  validate_panel(panel);
  check_grid(sys, panel.grid_size());
  CoefficientPanel out;
  out.layout = sys.layout();
  out.grid_size = panel.grid_size();
  out.calibration = std::sqrt(panel.spacing());
  out.coeffs.resize(static_cast<Eigen::Index>(out.layout.size()), panel.values.rows());
  for (Eigen::Index t = 0; t < panel.values.rows(); ++t) {
    const auto row = panel.values.row(t);
    const std::vector<double> c = forward_dwt(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), sys);
    for (std::size_t j = 0; j < c.size(); ++j) out.coeffs(static_cast<Eigen::Index>(j), t) = c[j] * out.calibration;
  }
  return out;
}

CurvePanel reconstruct(const CoefficientPanel& coeffs, const WaveletSystem& sys, const std::vector<double>& grid) {
  if (!(coeffs.layout == sys.layout())) throw Error(Errc::LayoutMismatch, "coefficient layout does not match the wavelet system");
  if (static_cast<std::size_t>(coeffs.coeffs.rows()) != coeffs.layout.size()) {
    throw Error(Errc::LayoutMismatch, "coefficient matrix has the wrong number of rows");
  }
  if (grid.size() < 2) throw Error(Errc::LayoutMismatch, "grid needs at least two points");
  check_grid(sys, grid.size());
  const double dx = grid[1] - grid[0];
  CurvePanel out;
  out.grid = grid;
  out.a = grid.front();
  out.b = grid.front() + dx * static_cast<double>(grid.size());
  const double scale = std::sqrt(out.spacing());
  out.values.resize(coeffs.coeffs.cols(), static_cast<Eigen::Index>(grid.size()));
  std::vector<double> column(coeffs.layout.size());
  for (Eigen::Index t = 0; t < coeffs.coeffs.cols(); ++t) {
    for (std::size_t j = 0; j < column.size(); ++j) column[j] = coeffs.coeffs(static_cast<Eigen::Index>(j), t) / scale;
    const std::vector<double> samples = inverse_dwt(column, sys, grid.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out.values(t, static_cast<Eigen::Index>(i)) = samples[i];
  }
  return out;
}

double threshold_level(std::span<const double> coeffs, const CoefficientLayout& layout, const ThresholdRule& rule,
                       std::size_t grid_size) {
  if (rule.kind == ThresholdRule::Kind::Fixed) return rule.lambda;
  const auto finest = layout.detail(layout.jmax());
  std::vector<double> mags(finest.count);
  for (std::size_t i = 0; i < finest.count; ++i) mags[i] = std::abs(coeffs[finest.offset + i]);
  const std::size_t mid = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid), mags.end());
  double median = mags[mid];
  if (mags.size() % 2 == 0) {
    const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  const double sigma = median / 0.6745;
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(grid_size)));
}

void hard_threshold_inplace(std::span<double> coeffs, const CoefficientLayout& layout, double lambda) {
  const std::size_t begin = layout.approximation().count;
  for (std::size_t i = begin; i < coeffs.size(); ++i) {
    if (std::abs(coeffs[i]) <= lambda) coeffs[i] = 0.0;
  }
}

CoefficientPanel hard_threshold(const CoefficientPanel& coeffs, const ThresholdRule& rule) {
  CoefficientPanel out = coeffs;
  for (Eigen::Index t = 0; t < out.coeffs.cols(); ++t) {
    std::span<double> col(out.coeffs.col(t).data(), static_cast<std::size_t>(out.coeffs.rows()));
    const double lambda = threshold_level(col, out.layout, rule, out.grid_size);
    hard_threshold_inplace(col, out.layout, lambda);
  }
  return out;
}

}  // namespace curvedim
