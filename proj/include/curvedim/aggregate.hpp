#pragma once

#include "curvedim/dimension.hpp"
#include "curvedim/panel.hpp"
#include "curvedim/wavelet.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace curvedim {

/// Weighted moving aggregation: curve t is sum_{u<delta} weights[u] * Y_{t-u}.
/// The usable lags are delta..max_lag-delta+1.
struct AggregationSpec {
  int delta = 1;
  std::vector<double> weights{1.0};  // omega_0 .. omega_{delta-1}
  int max_lag = 5;

  /// delta = 1, omega_0 = 1: the plain (non-aggregate) estimator.
  static AggregationSpec identity(int max_lag) { return {1, {1.0}, max_lag}; }

  void validate() const;
  [[nodiscard]] int first_lag() const noexcept { return delta; }
  [[nodiscard]] int last_lag() const noexcept { return max_lag - delta + 1; }
  /// n - p - delta + 1.
  [[nodiscard]] int effective_size(std::size_t curves) const noexcept {
    return static_cast<int>(curves) - max_lag - delta + 1;
  }
};

/// Aggregated panel with n - delta + 1 curves, t = delta..n.
[[nodiscard]] CurvePanel aggregate_curves(const CurvePanel& panel, const AggregationSpec& spec);

/// J x J matrix of the aggregate kernel in coefficient space for a centered
/// J x n coefficient matrix. delta = 1 gives build_kernel_matrix.
[[nodiscard]] Eigen::MatrixXd build_aggregate_D(const Eigen::MatrixXd& centered, const AggregationSpec& spec);

/// m x m matrix (m = n - p - delta + 1) built from the n x n Gram matrix of
/// centered curves; shares the nonzero spectrum of build_aggregate_D.
[[nodiscard]] Eigen::MatrixXd kstar_from_gram(const Eigen::MatrixXd& gram, const AggregationSpec& spec);

/// Gram matrix <Y_a - Ybar, Y_b - Ybar> by the periodic trapezoid rule, Ybar
/// averaging all n curves.
[[nodiscard]] Eigen::MatrixXd centered_gram(const CurvePanel& panel);

[[nodiscard]] Eigen::MatrixXd build_Kstar(const CurvePanel& panel, const AggregationSpec& spec);

/// Real parts of the eigenvalues of K*, descending. K* is not symmetric but
/// is similar to a positive semi-definite matrix, so imaginary parts are
/// rounding noise.
[[nodiscard]] Eigen::VectorXd kstar_eigenvalues(const Eigen::MatrixXd& kstar);

struct AggregateKernelEigen {
  Eigen::MatrixXd D_agg;
  Eigen::VectorXd eigenvalues;   // theta-hat, descending (from D_agg)
  Eigen::MatrixXd eigenvectors;  // coefficient vectors of the eigenfunctions
  Eigen::MatrixXd Kstar;         // empty unless requested
  Eigen::VectorXd kstar_values;
  AggregationSpec spec;
  int effective_size = 0;
};

/// Wavelet route on the raw panel; with `with_kstar` the inner-product route
/// is evaluated as well.
[[nodiscard]] AggregateKernelEigen estimate_aggregate_kernel(const CurvePanel& panel, const WaveletSystem& sys,
                                                             const AggregationSpec& spec, bool with_kstar = false);

/// Orthonormal psi-hat_1..psi-hat_d on the panel grid from the leading
/// eigenvectors gamma_j of K*: sum_i gamma_ij (Y_i - Ybar), then modified
/// Gram-Schmidt (two passes) in the trapezoid inner product.
[[nodiscard]] CurvePanel kstar_eigenfunctions(const CurvePanel& panel, const AggregationSpec& spec, int d);

/// Orthonormalizes the rows of `rows` in place (inner product dx * f.g).
/// Throws DegenerateBasis if a row is dependent on the previous ones to
/// within 1e-10 of its own norm.
void gram_schmidt_rows(RowMatrix& rows, double dx);

/// Closed-form eigenvalues for the simulation design, where the score
/// processes are independent AR(1) chains.
struct TrueEigenvalues {
  std::vector<int> lags;            // delta..p-delta+1
  Eigen::MatrixXd alpha;            // d x lags, alpha_jj^(k)
  Eigen::VectorXd aggregate;        // sum_k alpha^2, descending
  Eigen::VectorXd non_aggregate;    // sum_{k=1..p} sigma^2, descending
};

/// sigma_jj^(k) = sigma_w2 * theta_j^|k| / (1 - theta_j^2).
[[nodiscard]] double ar_autocovariance(double sigma_w2, double theta, int lag);
[[nodiscard]] TrueEigenvalues true_alpha(double sigma_w2, const std::vector<double>& ar_coeffs,
                                         const AggregationSpec& spec);

}  // namespace curvedim
