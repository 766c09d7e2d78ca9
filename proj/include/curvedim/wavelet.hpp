#pragma once

#include "curvedim/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace curvedim {

/// Row bookkeeping of a coefficient vector: approximation coefficients at
/// level j0 first, then detail levels j0, j0+1, ..., jmax. Level j holds 2^j
/// coefficients, so the total is 2^(jmax+1).
class CoefficientLayout {
 public:
  struct Block {
    int level = 0;
    bool approximation = false;
    std::size_t offset = 0;
    std::size_t count = 0;
  };

  CoefficientLayout() = default;
  CoefficientLayout(int j0, int jmax);

  [[nodiscard]] int j0() const noexcept { return j0_; }
  [[nodiscard]] int jmax() const noexcept { return jmax_; }
  [[nodiscard]] std::size_t size() const noexcept { return std::size_t{1} << (jmax_ + 1); }

  [[nodiscard]] Block approximation() const noexcept;
  [[nodiscard]] Block detail(int level) const;
  /// Approximation block followed by every detail block, coarse to fine.
  [[nodiscard]] std::vector<Block> blocks() const;

  [[nodiscard]] std::size_t approximation_row(std::size_t shift) const;
  [[nodiscard]] std::size_t detail_row(int level, std::size_t shift) const;

  friend bool operator==(const CoefficientLayout&, const CoefficientLayout&) = default;

 private:
  int j0_ = 0;
  int jmax_ = 0;
};

/// Daubechies filter pair plus the resolution range of the decomposition.
/// Both filters are stored on the support 0..2N-1; g_n = (-1)^n h_{2N-1-n},
/// i.e. the quadrature mirror relation g_n = (-1)^n h_{1-n} shifted by 2N-2.
struct WaveletSystem {
  int order = 1;  // N in DaubN: vanishing moments; filter length 2N
  std::vector<double> h;
  std::vector<double> g;
  int j0 = 0;
  int jmax = 0;

  [[nodiscard]] std::size_t filter_length() const noexcept { return h.size(); }
  [[nodiscard]] int mirror_shift() const noexcept { return 2 * order - 2; }
  [[nodiscard]] CoefficientLayout layout() const { return {j0, jmax}; }
};

/// Extremal-phase Daubechies scaling filter with `order` vanishing moments.
[[nodiscard]] std::span<const double> daubechies_filter(int order);

[[nodiscard]] WaveletSystem build_wavelet_system(int order, int j0, int jmax);

/// Parses "daub4", "Daub4", "DAUB4" or "db4" into 4.
[[nodiscard]] int parse_wavelet_family(std::string_view name);

/// J x n coefficient matrix, one column per curve. Coefficients are scaled by
/// `calibration` = dx^(1/2) so column dot products approximate L2 inner
/// products of the curves.
struct CoefficientPanel {
  Eigen::MatrixXd coeffs;
  CoefficientLayout layout;
  double calibration = 1.0;
  std::size_t grid_size = 0;

  [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(coeffs.rows()); }
  [[nodiscard]] std::size_t curve_count() const { return static_cast<std::size_t>(coeffs.cols()); }
};

// Uncalibrated periodic pyramid transform of one sampled curve.
[[nodiscard]] std::vector<double> forward_dwt(std::span<const double> samples, const WaveletSystem& sys);
[[nodiscard]] std::vector<double> inverse_dwt(std::span<const double> coeffs, const WaveletSystem& sys,
                                              std::size_t grid_size);

[[nodiscard]] CoefficientPanel decompose(const CurvePanel& panel, const WaveletSystem& sys);

/// Inverse of decompose. The calibration is taken from the grid spacing.
[[nodiscard]] CurvePanel reconstruct(const CoefficientPanel& coeffs, const WaveletSystem& sys,
                                     const std::vector<double>& grid);

struct ThresholdRule {
  enum class Kind { Universal, Fixed };
  Kind kind = Kind::Universal;
  double lambda = 0.0;  // used by Fixed

  static ThresholdRule universal() { return {}; }
  static ThresholdRule fixed(double lambda) { return {Kind::Fixed, lambda}; }
};

/// Threshold that `rule` assigns to one coefficient vector. The universal rule
/// is sigma * sqrt(2 ln N) with sigma = median(|finest details|) / 0.6745.
[[nodiscard]] double threshold_level(std::span<const double> coeffs, const CoefficientLayout& layout,
                                     const ThresholdRule& rule, std::size_t grid_size);

/// Zeroes detail coefficients with |c| <= lambda in place; approximation
/// coefficients are left alone.
void hard_threshold_inplace(std::span<double> coeffs, const CoefficientLayout& layout, double lambda);

[[nodiscard]] CoefficientPanel hard_threshold(const CoefficientPanel& coeffs, const ThresholdRule& rule);

}  // namespace curvedim
