#include "curvedim/density.hpp"
#include "curvedim/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace curvedim;

namespace {

std::vector<double> sample(std::size_t N, auto&& f) {
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = f(static_cast<double>(i) / static_cast<double>(N));
  return out;
}

}  // namespace

TEST(Normalize, UnitInputUnchanged) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(8);
  c(3) = 0.6;
  c(5) = -0.8;
  const SqrtDensityCurve out = normalize_sqrt_density(c, uniform_grid(0, 1, 8));
  EXPECT_LT((out.coeffs - c).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Normalize, ScaledInputIsHalved) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(8);
  c(0) = 2.0;
  EXPECT_DOUBLE_EQ(normalize_sqrt_density(c, uniform_grid(0, 1, 8)).coeffs(0), 1.0);
}

TEST(Normalize, IsIdempotent) {
  const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(16, -1.0, 2.0);
  const SqrtDensityCurve once = normalize_sqrt_density(c, uniform_grid(0, 1, 16));
  const SqrtDensityCurve twice = normalize_sqrt_density(once.coeffs, once.grid);
  EXPECT_LT((once.coeffs - twice.coeffs).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(once.coeffs.squaredNorm(), 1.0, 1e-10);
}

TEST(Normalize, RejectsZeroCurves) {
  try {
    (void)normalize_sqrt_density(Eigen::VectorXd::Constant(8, 1e-16), uniform_grid(0, 1, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroCurve);
  }
}

TEST(Square, UniformDensity) {
  const WaveletSystem sys = build_wavelet_system(4, 5, 7);
  const SqrtDensityCurve curve = sqrt_density_from_samples(sample(256, [](double) { return 1.0; }), sys);
  const CurvePanel dens = square_to_density(curve, sys);
  EXPECT_NEAR(integrate({dens.values.data(), 256}, dens.spacing()), 1.0, 1e-3);
  EXPECT_LT((dens.values.array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(Square, SineShapedRoot) {
  const WaveletSystem sys = build_wavelet_system(4, 5, 7);
  auto root = [](double x) { return std::numbers::sqrt2 * std::sin(std::numbers::pi * x); };
  const SqrtDensityCurve curve = sqrt_density_from_samples(sample(256, root), sys);
  const CurvePanel dens = square_to_density(curve, sys);
  const auto grid = uniform_grid(0, 1, 256);
  EXPECT_NEAR(integrate({dens.values.data(), 256}, dens.spacing()), 1.0, 1e-3);
  for (std::size_t i = 0; i < 256; ++i) {
    const double expected = 2 * std::pow(std::sin(std::numbers::pi * grid[i]), 2);
    EXPECT_NEAR(dens.values(0, static_cast<Eigen::Index>(i)), expected, 1e-9);
  }
}

TEST(Square, CoarseLevelsStillIntegrateToOne) {
  // jmax below the grid depth projects the root first; the result is still a
  // bona fide density.
  const WaveletSystem sys = build_wavelet_system(6, 2, 4);
  auto root = [](double x) { return 1.0 + 0.8 * std::cos(6 * x) + x * x; };
  const CurvePanel dens = square_to_density(sqrt_density_from_samples(sample(128, root), sys), sys);
  EXPECT_NEAR(integrate({dens.values.data(), 128}, dens.spacing()), 1.0, 1e-10);
  EXPECT_GE(dens.values.minCoeff(), 0.0);
}

TEST(Panel, SquareRootsOfDensities) {
  RowMatrix v(2, 4);
  v << 1, 4, 0, 9, 0.25, -1e-13, 1, 1;
  const CurvePanel roots = sqrt_density_panel(make_panel(v));
  EXPECT_DOUBLE_EQ(roots.values(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(roots.values(1, 1), 0.0);
  v(0, 2) = -0.1;
  try {
    (void)sqrt_density_panel(make_panel(v));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NegativeDensity);
  }
}
