#include "curvedim/density.hpp"

#include "curvedim/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace curvedim {

SqrtDensityCurve normalize_sqrt_density(const Eigen::VectorXd& coeffs, std::vector<double> grid, double a, double b) {
  const double norm = coeffs.norm();
  if (!(norm >= 1e-14)) throw Error(Errc::ZeroCurve, "square-root density has (near) zero norm");
  return {coeffs / norm, std::move(grid), a, b};
}

SqrtDensityCurve sqrt_density_from_samples(std::span<const double> samples, const WaveletSystem& sys, double a,
                                           double b) {
  RowMatrix row(1, static_cast<Eigen::Index>(samples.size()));
  std::copy(samples.begin(), samples.end(), row.data());
  const CurvePanel panel = make_panel(std::move(row), a, b);
  const CoefficientPanel coeffs = decompose(panel, sys);
  return normalize_sqrt_density(coeffs.coeffs.col(0), panel.grid, a, b);
}

CurvePanel square_to_density(const SqrtDensityCurve& curve, const WaveletSystem& sys) {
  CoefficientPanel coeffs;
  coeffs.layout = sys.layout();
  coeffs.grid_size = curve.grid.size();
  coeffs.coeffs = curve.coeffs;
  CurvePanel out = reconstruct(coeffs, sys, curve.grid);
  out.a = curve.a;
  out.b = curve.b;
  out.values = out.values.array().square().matrix();
  return out;
}

CurvePanel sqrt_density_panel(const CurvePanel& densities) {
  CurvePanel out = densities;
  for (Eigen::Index t = 0; t < out.values.rows(); ++t) {
    for (Eigen::Index i = 0; i < out.values.cols(); ++i) {
      double& v = out.values(t, i);
      if (v < -1e-12 || !std::isfinite(v)) {
        throw Error(Errc::NegativeDensity, "density " + std::to_string(t) + " is negative at grid point " +
                                               std::to_string(i));
      }
      v = std::sqrt(std::max(v, 0.0));
    }
  }
  return out;
}

double integrate(std::span<const double> samples, double dx) {
  return dx * std::accumulate(samples.begin(), samples.end(), 0.0);
}

}  // namespace curvedim
