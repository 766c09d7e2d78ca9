#pragma once

#include "curvedim/panel.hpp"
#include "curvedim/wavelet.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace curvedim {

/// Calibrated wavelet coefficients of a square-root density on a dyadic grid.
/// After normalization the coefficient norm, and hence the L2 norm of the
/// reconstructed curve, is 1.
struct SqrtDensityCurve {
  Eigen::VectorXd coeffs;
  std::vector<double> grid;
  double a = 0.0;
  double b = 1.0;
};

/// Divides by the Euclidean norm. Throws ZeroCurve if the norm is below 1e-14.
[[nodiscard]] SqrtDensityCurve normalize_sqrt_density(const Eigen::VectorXd& coeffs, std::vector<double> grid,
                                                      double a = 0.0, double b = 1.0);

/// Decomposes a sampled square-root density and normalizes it.
[[nodiscard]] SqrtDensityCurve sqrt_density_from_samples(std::span<const double> samples, const WaveletSystem& sys,
                                                         double a = 0.0, double b = 1.0);

/// Pointwise square of the reconstructed curve: a one-row panel that is
/// non-negative and integrates to one.
[[nodiscard]] CurvePanel square_to_density(const SqrtDensityCurve& curve, const WaveletSystem& sys);

/// Pointwise square roots of a panel of densities, ready for the dimension
/// pipeline. Values in [-1e-12, 0) are treated as zero; anything more negative
/// throws NegativeDensity.
[[nodiscard]] CurvePanel sqrt_density_panel(const CurvePanel& densities);

/// Integral by the periodic trapezoid rule.
[[nodiscard]] double integrate(std::span<const double> samples, double dx);

}  // namespace curvedim
