#include "curvedim/error.hpp"
#include "curvedim/wavelet.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace curvedim;

namespace {

CurvePanel sampled(std::size_t N, auto&& f, double a = 0.0, double b = 1.0) {
  RowMatrix values(1, static_cast<Eigen::Index>(N));
  const auto grid = uniform_grid(a, b, N);
  for (std::size_t i = 0; i < N; ++i) values(0, static_cast<Eigen::Index>(i)) = f(grid[i]);
  return make_panel(std::move(values), a, b);
}

}  // namespace

TEST(Filters, HaarIsForced) {
  const WaveletSystem sys = build_wavelet_system(1, 5, 7);
  ASSERT_EQ(sys.h.size(), 2u);
  EXPECT_NEAR(sys.h[0], 1 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(sys.h[1], 1 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(sys.g[0], 1 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(sys.g[1], -1 / std::numbers::sqrt2, 1e-15);
}

TEST(Filters, Daub2MatchesClosedForm) {
  const double s3 = std::sqrt(3.0);
  const double d = 4 * std::numbers::sqrt2;
  const std::vector<double> expected{(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
  const auto h = daubechies_filter(2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(h[i], expected[i], 1e-15);
}

TEST(Filters, OrthonormalityForEveryOrder) {
  for (int N = 1; N <= 10; ++N) {
    const WaveletSystem sys = build_wavelet_system(N, 0, 0);
    ASSERT_EQ(sys.filter_length(), static_cast<std::size_t>(2 * N));
    const double sum = std::accumulate(sys.h.begin(), sys.h.end(), 0.0);
    EXPECT_NEAR(sum, std::numbers::sqrt2, 1e-12) << "N=" << N;
    for (int shift = 0; shift < N; ++shift) {
      double acc = 0.0;
      for (std::size_t k = 0; k + 2 * shift < sys.h.size(); ++k) acc += sys.h[k] * sys.h[k + 2 * shift];
      EXPECT_NEAR(acc, shift == 0 ? 1.0 : 0.0, 1e-12) << "N=" << N << " shift=" << shift;
    }
  }
}

TEST(Filters, QuadratureMirrorRelation) {
  // g_n = (-1)^n h_{1-n} after moving the support of g to 0..2N-1.
  for (int N = 1; N <= 10; ++N) {
    const WaveletSystem sys = build_wavelet_system(N, 0, 0);
    const int shift = sys.mirror_shift();
    for (int n = 0; n < 2 * N; ++n) {
      const int m = n - shift;  // index in the textbook alignment
      const int src = 1 - m;
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      EXPECT_NEAR(sys.g[static_cast<std::size_t>(n)], sign * sys.h[static_cast<std::size_t>(src)], 1e-12);
    }
  }
}

TEST(Filters, WaveletFilterHasVanishingMoments) {
  for (int N = 1; N <= 10; ++N) {
    const WaveletSystem sys = build_wavelet_system(N, 0, 0);
    for (int k = 0; k < N; ++k) {
      double acc = 0.0;
      double scale = 0.0;
      for (std::size_t n = 0; n < sys.g.size(); ++n) {
        acc += sys.g[n] * std::pow(static_cast<double>(n), k);
        scale += std::abs(sys.g[n]) * std::pow(static_cast<double>(n), k);
      }
      EXPECT_LT(std::abs(acc), 1e-9 * scale) << "N=" << N << " k=" << k;
    }
  }
}

TEST(Filters, RejectsUnsupportedFamiliesAndLevels) {
  EXPECT_THROW((void)build_wavelet_system(0, 1, 2), Error);
  EXPECT_THROW((void)build_wavelet_system(11, 1, 2), Error);
  try {
    (void)build_wavelet_system(4, 6, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadLevels);
  }
  try {
    (void)build_wavelet_system(12, 5, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedFamily);
  }
}

TEST(Filters, ParsesFamilyNames) {
  EXPECT_EQ(parse_wavelet_family("daub4"), 4);
  EXPECT_EQ(parse_wavelet_family("Daub10"), 10);
  EXPECT_EQ(parse_wavelet_family("db1"), 1);
  EXPECT_THROW((void)parse_wavelet_family("haar"), Error);
  EXPECT_THROW((void)parse_wavelet_family("daub11"), Error);
  EXPECT_THROW((void)parse_wavelet_family("daub"), Error);
}

TEST(Layout, BlocksCoverEveryRowOnce) {
  const CoefficientLayout layout(3, 6);
  EXPECT_EQ(layout.size(), 128u);
  std::vector<int> hits(layout.size(), 0);
  for (const auto& blk : layout.blocks()) {
    for (std::size_t i = 0; i < blk.count; ++i) ++hits[blk.offset + i];
  }
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_EQ(layout.approximation_row(7), 7u);
  EXPECT_EQ(layout.detail_row(3, 0), 8u);
  EXPECT_EQ(layout.detail_row(6, 63), 127u);
  EXPECT_THROW((void)layout.detail_row(6, 64), Error);
}

TEST(Decompose, ZeroCurveGivesZeroCoefficients) {
  const WaveletSystem sys = build_wavelet_system(4, 5, 7);
  const CoefficientPanel c = decompose(sampled(256, [](double) { return 0.0; }), sys);
  EXPECT_EQ(c.coeffs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Decompose, ConstantHasNoDetail) {
  for (int N : {1, 4, 10}) {
    const WaveletSystem sys = build_wavelet_system(N, 2, 7);
    const CoefficientPanel c = decompose(sampled(256, [](double) { return 1.0; }), sys);
    const auto approx = c.layout.approximation();
    const Eigen::VectorXd details = c.coeffs.col(0).tail(c.coeffs.rows() - static_cast<Eigen::Index>(approx.count));
    EXPECT_LT(details.cwiseAbs().maxCoeff(), 1e-12) << "N=" << N;
  }
}

TEST(Decompose, PolynomialsVanishOnInteriorWindows) {
  // Away from the periodic wrap, finest-level details of a polynomial of
  // degree < N are zero.
  const std::size_t len = 256;
  for (int N : {2, 4, 6}) {
    const WaveletSystem sys = build_wavelet_system(N, 5, 7);
    for (int degree = 0; degree < N; ++degree) {
      const CurvePanel p = sampled(len, [degree](double x) { return std::pow(x - 0.4, degree); });
      const std::vector<double> c = forward_dwt({p.values.data(), len}, sys);
      const auto blk = sys.layout().detail(7);
      for (std::size_t k = 0; k < blk.count; ++k) {
        if (2 * k + sys.filter_length() > len) continue;
        EXPECT_NEAR(c[blk.offset + k], 0.0, 1e-10) << "N=" << N << " degree=" << degree << " k=" << k;
      }
    }
  }
}

TEST(Decompose, CoefficientDotProductMatchesQuadrature) {
  const WaveletSystem sys = build_wavelet_system(4, 5, 7);
  auto f = [](double x) { return std::numbers::sqrt2 * std::cos(std::numbers::pi * x); };
  const CurvePanel p = sampled(256, f);
  const CoefficientPanel c = decompose(p, sys);
  // composite trapezoid on [0, 1] including the endpoint
  double trap = 0.0;
  const double h = 1.0 / 256;
  for (int i = 0; i <= 256; ++i) {
    const double w = (i == 0 || i == 256) ? 0.5 : 1.0;
    trap += w * f(i * h) * f(i * h);
  }
  trap *= h;
  EXPECT_NEAR(c.coeffs.col(0).squaredNorm(), trap, 1e-3);
  EXPECT_NEAR(c.coeffs.col(0).squaredNorm(), 1.0, 1e-3);
}

TEST(Decompose, EnergyIsPreservedForFullDepth) {
  const WaveletSystem sys = build_wavelet_system(6, 2, 7);
  const CurvePanel p = make_panel(oracle::gaussian_rows(5, 256, 3), -1.0, 2.0);
  const CoefficientPanel c = decompose(p, sys);
  for (Eigen::Index t = 0; t < 5; ++t) {
    const double grid_energy = p.spacing() * p.values.row(t).squaredNorm();
    EXPECT_NEAR(c.coeffs.col(t).squaredNorm(), grid_energy, 1e-10 * grid_energy);
  }
}

TEST(Decompose, RejectsNonDyadicGrids) {
  const WaveletSystem sys = build_wavelet_system(2, 1, 3);
  std::vector<double> samples(48, 1.0);
  try {
    (void)forward_dwt(samples, sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::GridNotDyadic);
  }
  std::vector<double> short_grid(8, 1.0);
  EXPECT_THROW((void)forward_dwt(short_grid, sys), Error);
}

TEST(Reconstruct, WhiteNoiseRoundTrip) {
  const WaveletSystem sys = build_wavelet_system(4, 2, 5);
  const CurvePanel p = make_panel(oracle::gaussian_rows(8, 64, 11));
  const CurvePanel back = reconstruct(decompose(p, sys), sys, p.grid);
  EXPECT_LT((back.values - p.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Reconstruct, RoundTripEveryFamily) {
  const CurvePanel p = make_panel(oracle::gaussian_rows(3, 256, 5), 0.0, 3.0);
  for (int N = 1; N <= 10; ++N) {
    const WaveletSystem sys = build_wavelet_system(N, 4, 7);
    const CurvePanel back = reconstruct(decompose(p, sys), sys, p.grid);
    const double scale = p.values.cwiseAbs().maxCoeff();
    EXPECT_LT((back.values - p.values).cwiseAbs().maxCoeff(), 1e-9 * scale) << "N=" << N;
  }
}

TEST(Reconstruct, UnitCoefficientIsScalingFunction) {
  const int j0 = 3;
  const WaveletSystem sys = build_wavelet_system(4, j0, 7);
  const auto grid = uniform_grid(0.0, 1.0, 256);
  CoefficientPanel c;
  c.layout = sys.layout();
  c.grid_size = 256;
  c.coeffs = Eigen::MatrixXd::Zero(256, 2);
  c.coeffs(0, 0) = 1.0;
  c.coeffs(1, 1) = 1.0;
  const CurvePanel phi = reconstruct(c, sys, grid);
  const double dx = 1.0 / 256;
  // unit norm, integral 2^{-j0/2}, and (j0, 1) is (j0, 0) translated by 2^{-j0}
  EXPECT_NEAR(dx * phi.values.row(0).squaredNorm(), 1.0, 1e-12);
  EXPECT_NEAR(dx * phi.values.row(0).sum(), std::pow(2.0, -j0 / 2.0), 1e-12);
  EXPECT_NEAR(dx * phi.values.row(0).dot(phi.values.row(1)), 0.0, 1e-12);
  const Eigen::Index step = 256 >> j0;
  for (Eigen::Index i = 0; i < 256; ++i) {
    EXPECT_NEAR(phi.values(1, (i + step) % 256), phi.values(0, i), 1e-12);
  }
}

TEST(Reconstruct, LayoutMismatchIsReported) {
  const WaveletSystem sys = build_wavelet_system(4, 3, 6);
  const WaveletSystem other = build_wavelet_system(4, 2, 6);
  const CurvePanel p = make_panel(oracle::gaussian_rows(2, 128, 1));
  const CoefficientPanel c = decompose(p, sys);
  try {
    (void)reconstruct(c, other, p.grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LayoutMismatch);
  }
}

TEST(Threshold, FixedLevelZeroesSmallDetailsOnly) {
  const WaveletSystem sys = build_wavelet_system(2, 2, 4);
  const CurvePanel p = make_panel(oracle::gaussian_rows(3, 32, 8));
  const CoefficientPanel c = decompose(p, sys);
  const double lambda = 0.1;
  const CoefficientPanel t = hard_threshold(c, ThresholdRule::fixed(lambda));
  const auto approx = c.layout.approximation().count;
  for (Eigen::Index col = 0; col < 3; ++col) {
    for (Eigen::Index r = 0; r < c.coeffs.rows(); ++r) {
      const double v = c.coeffs(r, col);
      if (static_cast<std::size_t>(r) < approx || std::abs(v) > lambda) {
        EXPECT_EQ(t.coeffs(r, col), v);
      } else {
        EXPECT_EQ(t.coeffs(r, col), 0.0);
      }
    }
  }
}

TEST(Threshold, UniversalLevelUsesFinestMad) {
  const CoefficientLayout layout(1, 3);
  std::vector<double> c(layout.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::sin(1.3 * static_cast<double>(i)) * (i + 1.0);
  const auto fin = layout.detail(3);
  std::vector<double> mags;
  for (std::size_t i = 0; i < fin.count; ++i) mags.push_back(std::abs(c[fin.offset + i]));
  std::sort(mags.begin(), mags.end());
  const double median = 0.5 * (mags[3] + mags[4]);
  const double expected = median / 0.6745 * std::sqrt(2.0 * std::log(64.0));
  EXPECT_NEAR(threshold_level(c, layout, ThresholdRule::universal(), 64), expected, 1e-12);
}

TEST(Threshold, ZeroLevelChangesNothing) {
  const WaveletSystem sys = build_wavelet_system(3, 2, 5);
  const CoefficientPanel c = decompose(make_panel(oracle::gaussian_rows(4, 64, 2)), sys);
  EXPECT_EQ(hard_threshold(c, ThresholdRule::fixed(0.0)).coeffs, c.coeffs);
}
