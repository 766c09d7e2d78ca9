#pragma once

#include "curvedim/wavelet.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace curvedim {

/// Centered coefficients c_j^t = a_j^t - mean_j together with the mean.
struct CenteredCoefficients {
  CoefficientPanel centered;
  Eigen::VectorXd mean;
};

[[nodiscard]] CenteredCoefficients center_coefficients(const CoefficientPanel& raw);

/// How the lag kernel product is evaluated. Both routes give the same matrix;
/// Auto picks the one with fewer flops for the panel shape.
enum class KernelRoute { Auto, CrossProducts, LagGram };

/// D = (n-p)^-2 C_{1:n-p} (sum_{k=1..p} C_{k+1:n-p+k}^T C_{k+1:n-p+k}) C_{1:n-p}^T
/// for a centered J x n coefficient matrix. Throws LagTooLarge if p >= n-1.
[[nodiscard]] Eigen::MatrixXd build_kernel_matrix(const Eigen::MatrixXd& centered, int max_lag,
                                                  KernelRoute route = KernelRoute::Auto);

/// Symmetric eigensystem, eigenvalues descending (ties keep solver order),
/// each eigenvector signed so its largest-magnitude entry is positive.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Throws NotSymmetric if ||D - D^T||_inf exceeds 1e-10 * max(1, ||D||_inf).
[[nodiscard]] EigenSystem eigen_decompose(const Eigen::MatrixXd& matrix);

/// Eigenvalues only, descending. Used on the bootstrap hot path.
[[nodiscard]] Eigen::VectorXd descending_eigenvalues(const Eigen::MatrixXd& symmetric);

struct KernelEigen {
  Eigen::MatrixXd D;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column m is b^m
  int max_lag = 0;
  int n_effective = 0;           // n - p
};

/// build_kernel_matrix followed by eigen_decompose.
[[nodiscard]] KernelEigen estimate_kernel(const CoefficientPanel& centered, int max_lag);

/// The first d eigenfunctions h_m = Phi^T b^m sampled on `grid` (d x N panel).
[[nodiscard]] CurvePanel eigenfunctions(const KernelEigen& ke, const WaveletSystem& sys,
                                        const std::vector<double>& grid, int d);

struct ScorePanel {
  Eigen::MatrixXd eta;         // n x d, eta_tl = sum_j c_j^t b_j^l
  Eigen::VectorXd mean_coeffs;
};

struct FittedCurves {
  ScorePanel scores;
  CoefficientPanel fitted;  // mean + sum_{l<=d} eta_tl b^l
};

[[nodiscard]] FittedCurves scores_and_fit(const CoefficientPanel& raw, const KernelEigen& ke, int d);

}  // namespace curvedim
