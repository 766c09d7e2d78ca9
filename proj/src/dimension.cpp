#include "curvedim/dimension.hpp"

#include "curvedim/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace curvedim {

CenteredCoefficients center_coefficients(const CoefficientPanel& raw) {
  if (raw.coeffs.cols() < 2) throw Error(Errc::TooFewCurves, "centering needs at least two curves");
  CenteredCoefficients out;
  out.mean = raw.coeffs.rowwise().mean();
  out.centered = raw;
  out.centered.coeffs.colwise() -= out.mean;
  return out;
}

namespace {

// Flop counts of the two evaluation orders for J rows, m effective columns and
// p lags.
double cross_product_cost(double J, double m, double p) { return p * J * J * m + 0.5 * p * J * J * J; }
double lag_gram_cost(double J, double m, double p) { return 0.5 * p * m * m * J + J * m * m + J * J * m; }

}  // namespace

Eigen::MatrixXd build_kernel_matrix(const Eigen::MatrixXd& centered, int max_lag, KernelRoute route) {
  const Eigen::Index J = centered.rows();
  const Eigen::Index n = centered.cols();
  if (max_lag < 1) throw Error(Errc::LagTooLarge, "maximum lag must be at least 1");
  if (max_lag >= n - 1) {
    throw Error(Errc::LagTooLarge, "maximum lag " + std::to_string(max_lag) + " needs more than " +
                                       std::to_string(max_lag + 1) + " curves, got " + std::to_string(n));
  }
  const Eigen::Index m = n - max_lag;
  const Eigen::Index p = max_lag;
  if (route == KernelRoute::Auto) {
    route = cross_product_cost(J, m, p) <= lag_gram_cost(J, m, p) ? KernelRoute::CrossProducts
                                                                  : KernelRoute::LagGram;
  }
  const auto base = centered.leftCols(m);
  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(m));

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(J, J);
  if (route == KernelRoute::CrossProducts) {
    // D = sum_k (C_1 C_k^T)(C_1 C_k^T)^T = A A^T with A = [C_1 C_1^T ... C_1 C_p^T]
    Eigen::MatrixXd lagged(p * J, m);
    for (Eigen::Index k = 1; k <= p; ++k) lagged.middleRows((k - 1) * J, J) = centered.middleCols(k, m);
    Eigen::MatrixXd A;
    A.noalias() = base * lagged.transpose();
    D.selfadjointView<Eigen::Lower>().rankUpdate(A, scale);
  } else {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 1; k <= p; ++k) {
      W.selfadjointView<Eigen::Lower>().rankUpdate(centered.middleCols(k, m).transpose());
    }
    Eigen::MatrixXd full_w = W.selfadjointView<Eigen::Lower>();
    Eigen::MatrixXd left;
    left.noalias() = base * full_w;
    Eigen::MatrixXd product;
    product.noalias() = left * base.transpose();
    D.triangularView<Eigen::Lower>() = scale * 0.5 * (product + product.transpose());
  }
  D.triangularView<Eigen::StrictlyUpper>() = D.transpose();
  return D;
}

namespace {

void check_symmetric(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw Error(Errc::NotSymmetric, "matrix is not square");
  const double asym = (matrix - matrix.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  const double norm = matrix.cwiseAbs().rowwise().sum().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, norm)) {
    throw Error(Errc::NotSymmetric, "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
}

}  // namespace

EigenSystem eigen_decompose(const Eigen::MatrixXd& matrix) {
  check_symmetric(matrix);
  const Eigen::Index J = matrix.rows();
  EigenSystem out;
  if (J == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) throw Error(Errc::NotSymmetric, "eigen solver did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(J));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& ascending = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return ascending(x) > ascending(y); });

  out.values.resize(J);
  out.vectors.resize(J, J);
  for (Eigen::Index c = 0; c < J; ++c) {
    const Eigen::Index src = order[static_cast<std::size_t>(c)];
    out.values(c) = ascending(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0.0) v = -v;
    out.vectors.col(c) = v;
  }
  return out;
}

Eigen::VectorXd descending_eigenvalues(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(Errc::NotSymmetric, "eigen solver did not converge");
  return solver.eigenvalues().reverse();
}

KernelEigen estimate_kernel(const CoefficientPanel& centered, int max_lag) {
  KernelEigen ke;
  ke.D = build_kernel_matrix(centered.coeffs, max_lag);
  EigenSystem eig = eigen_decompose(ke.D);
  ke.eigenvalues = std::move(eig.values);
  ke.eigenvectors = std::move(eig.vectors);
  ke.max_lag = max_lag;
  ke.n_effective = static_cast<int>(centered.coeffs.cols()) - max_lag;
  return ke;
}

CurvePanel eigenfunctions(const KernelEigen& ke, const WaveletSystem& sys, const std::vector<double>& grid, int d) {
  if (d < 1 || d > ke.eigenvectors.cols()) {
    throw Error(Errc::RankRequestTooLarge, "requested " + std::to_string(d) + " eigenfunctions out of " +
                                               std::to_string(ke.eigenvectors.cols()));
  }
  CoefficientPanel basis;
  basis.layout = sys.layout();
  basis.grid_size = grid.size();
  basis.coeffs = ke.eigenvectors.leftCols(d);
  return reconstruct(basis, sys, grid);
}

FittedCurves scores_and_fit(const CoefficientPanel& raw, const KernelEigen& ke, int d) {
  if (d < 0 || d > ke.eigenvectors.cols()) {
    throw Error(Errc::RankRequestTooLarge, "fit dimension " + std::to_string(d) + " out of range");
  }
  const CenteredCoefficients cc = center_coefficients(raw);
  const auto basis = ke.eigenvectors.leftCols(d);

  FittedCurves out;
  out.scores.mean_coeffs = cc.mean;
  out.scores.eta.noalias() = cc.centered.coeffs.transpose() * basis;
  out.fitted = raw;
  out.fitted.coeffs.noalias() = basis * out.scores.eta.transpose();
  out.fitted.coeffs.colwise() += cc.mean;
  return out;
}

}  // namespace curvedim
