#include "curvedim/aggregate.hpp"

#include "curvedim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace curvedim {

void AggregationSpec::validate() const {
  if (delta < 1) throw Error(Errc::InvalidConfig, "aggregation window must be at least 1");
  if (weights.size() != static_cast<std::size_t>(delta)) {
    throw Error(Errc::InvalidConfig, "expected " + std::to_string(delta) + " weights, got " +
                                         std::to_string(weights.size()));
  }
  if (!std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); })) {
    throw Error(Errc::InvalidConfig, "weights must be finite");
  }
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw Error(Errc::InvalidConfig, "at least one weight must be nonzero");
  }
  if (max_lag < 2 * delta - 1) {
    throw Error(Errc::LagWindowEmpty, "p=" + std::to_string(max_lag) + " < 2*delta-1=" + std::to_string(2 * delta - 1));
  }
}

CurvePanel aggregate_curves(const CurvePanel& panel, const AggregationSpec& spec) {
  if (spec.delta < 1 || spec.weights.size() != static_cast<std::size_t>(spec.delta)) {
    throw Error(Errc::InvalidConfig, "weights must have delta entries");
  }
  const auto n = static_cast<Eigen::Index>(panel.curve_count());
  if (n < spec.delta) {
    throw Error(Errc::WindowTooLong, "window " + std::to_string(spec.delta) + " exceeds " + std::to_string(n) +
                                         " curves");
  }
  CurvePanel out = panel;
  out.values = RowMatrix::Zero(n - spec.delta + 1, panel.values.cols());
  for (Eigen::Index t = spec.delta - 1; t < n; ++t) {
    for (int u = 0; u < spec.delta; ++u) {
      out.values.row(t - spec.delta + 1) += spec.weights[static_cast<std::size_t>(u)] * panel.values.row(t - u);
    }
  }
  return out;
}

namespace {

int checked_effective_size(Eigen::Index n, const AggregationSpec& spec) {
  spec.validate();
  const int m = spec.effective_size(static_cast<std::size_t>(n));
  if (m < 2) {
    throw Error(Errc::LagTooLarge, "n - p - delta + 1 = " + std::to_string(m) + " leaves fewer than two terms");
  }
  return m;
}

// Calls fn(k, shift, weight) for every lag k and weight pair (u, v); the
// source curve index is i + shift with shift = k + u - v.
template <class Fn>
void for_each_shift(const AggregationSpec& spec, Fn&& fn) {
  for (int k = spec.first_lag(); k <= spec.last_lag(); ++k) {
    for (int u = 0; u < spec.delta; ++u) {
      for (int v = 0; v < spec.delta; ++v) {
        fn(k, k + u - v, spec.weights[static_cast<std::size_t>(u)] * spec.weights[static_cast<std::size_t>(v)]);
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd build_aggregate_D(const Eigen::MatrixXd& centered, const AggregationSpec& spec) {
  const int m = checked_effective_size(centered.cols(), spec);
  const Eigen::Index J = centered.rows();
  const auto base = centered.leftCols(m);

  // D = sum_k A_k A_k^T, A_k = C_1 S_k^T / m, S_k = sum_{u,v} w_u w_v C_{shift}
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(J, J);
  Eigen::MatrixXd S(J, m);
  Eigen::MatrixXd A(J, J);
  for (int k = spec.first_lag(); k <= spec.last_lag(); ++k) {
    S.setZero();
    for (int u = 0; u < spec.delta; ++u) {
      for (int v = 0; v < spec.delta; ++v) {
        const double w = spec.weights[static_cast<std::size_t>(u)] * spec.weights[static_cast<std::size_t>(v)];
        S += w * centered.middleCols(k + u - v, m);
      }
    }
    A.noalias() = base * S.transpose();
    D.selfadjointView<Eigen::Lower>().rankUpdate(A, 1.0 / (static_cast<double>(m) * m));
  }
  D.triangularView<Eigen::StrictlyUpper>() = D.transpose();
  return D;
}

Eigen::MatrixXd centered_gram(const CurvePanel& panel) {
  if (panel.curve_count() < 2) throw Error(Errc::TooFewCurves, "need at least two curves");
  RowMatrix centered = panel.values;
  centered.rowwise() -= panel.values.colwise().mean();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(centered.rows(), centered.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(centered, panel.spacing());
  return gram.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd kstar_from_gram(const Eigen::MatrixXd& gram, const AggregationSpec& spec) {
  const int m = checked_effective_size(gram.rows(), spec);
  const Eigen::Index n = gram.rows();
  // W = sum_k P_k^T Gamma P_k / m^2 where P_k picks the weighted shifted
  // columns; K* = W Gamma[0:m, 0:m].
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd G(n, m);
  for (int k = spec.first_lag(); k <= spec.last_lag(); ++k) {
    G.setZero();
    for (int u = 0; u < spec.delta; ++u) {
      for (int v = 0; v < spec.delta; ++v) {
        const double w = spec.weights[static_cast<std::size_t>(u)] * spec.weights[static_cast<std::size_t>(v)];
        G += w * gram.middleCols(k + u - v, m);
      }
    }
    for (int u = 0; u < spec.delta; ++u) {
      for (int v = 0; v < spec.delta; ++v) {
        const double w = spec.weights[static_cast<std::size_t>(u)] * spec.weights[static_cast<std::size_t>(v)];
        W += w * G.middleRows(k + u - v, m);
      }
    }
  }
  W /= static_cast<double>(m) * m;
  Eigen::MatrixXd kstar;
  kstar.noalias() = W * gram.topLeftCorner(m, m);
  return kstar;
}

Eigen::MatrixXd build_Kstar(const CurvePanel& panel, const AggregationSpec& spec) {
  validate_panel(panel);
  return kstar_from_gram(centered_gram(panel), spec);
}

Eigen::VectorXd kstar_eigenvalues(const Eigen::MatrixXd& kstar) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(kstar, false);
  if (solver.info() != Eigen::Success) throw Error(Errc::DegenerateBasis, "K* eigen solver did not converge");
  Eigen::VectorXd values = solver.eigenvalues().real();
  std::sort(values.data(), values.data() + values.size(), std::greater<>());
  return values;
}

AggregateKernelEigen estimate_aggregate_kernel(const CurvePanel& panel, const WaveletSystem& sys,
                                               const AggregationSpec& spec, bool with_kstar) {
  const CenteredCoefficients cc = center_coefficients(decompose(panel, sys));
  AggregateKernelEigen out;
  out.spec = spec;
  out.D_agg = build_aggregate_D(cc.centered.coeffs, spec);
  out.effective_size = spec.effective_size(panel.curve_count());
  EigenSystem eig = eigen_decompose(out.D_agg);
  out.eigenvalues = std::move(eig.values);
  out.eigenvectors = std::move(eig.vectors);
  if (with_kstar) {
    out.Kstar = build_Kstar(panel, spec);
    out.kstar_values = kstar_eigenvalues(out.Kstar);
  }
  return out;
}

void gram_schmidt_rows(RowMatrix& rows, double dx) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double original = std::sqrt(dx * rows.row(r).squaredNorm());
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index q = 0; q < r; ++q) {
        rows.row(r) -= (dx * rows.row(r).dot(rows.row(q))) * rows.row(q);
      }
    }
    const double norm = std::sqrt(dx * rows.row(r).squaredNorm());
    if (!(norm > 1e-10 * original) || original == 0.0) {
      throw Error(Errc::DegenerateBasis, "direction " + std::to_string(r + 1) + " is linearly dependent");
    }
    rows.row(r) /= norm;
  }
}

CurvePanel kstar_eigenfunctions(const CurvePanel& panel, const AggregationSpec& spec, int d) {
  const Eigen::MatrixXd kstar = build_Kstar(panel, spec);
  const Eigen::Index m = kstar.rows();
  if (d < 1 || d > m) throw Error(Errc::RankRequestTooLarge, "requested " + std::to_string(d) + " directions");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(kstar, true);
  if (solver.info() != Eigen::Success) throw Error(Errc::DegenerateBasis, "K* eigen solver did not converge");
  const Eigen::VectorXd values = solver.eigenvalues().real();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return values(x) > values(y); });

  RowMatrix centered = panel.values.topRows(m);
  centered.rowwise() -= panel.values.colwise().mean();

  CurvePanel out = panel;
  out.values.resize(d, panel.values.cols());
  for (int j = 0; j < d; ++j) {
    const Eigen::VectorXd gamma = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]).real();
    out.values.row(j) = gamma.transpose() * centered;
  }
  gram_schmidt_rows(out.values, panel.spacing());
  for (int j = 0; j < d; ++j) {
    Eigen::Index pivot = 0;
    out.values.row(j).cwiseAbs().maxCoeff(&pivot);
    if (out.values(j, pivot) < 0.0) out.values.row(j) *= -1.0;
  }
  return out;
}

double ar_autocovariance(double sigma_w2, double theta, int lag) {
  if (!(std::abs(theta) < 1.0)) {
    throw Error(Errc::NonStationaryAR, "AR coefficient " + std::to_string(theta) + " is not stationary");
  }
  return sigma_w2 * std::pow(theta, std::abs(lag)) / (1.0 - theta * theta);
}

TrueEigenvalues true_alpha(double sigma_w2, const std::vector<double>& ar_coeffs, const AggregationSpec& spec) {
  spec.validate();
  for (double theta : ar_coeffs) (void)ar_autocovariance(sigma_w2, theta, 0);

  const auto d = static_cast<Eigen::Index>(ar_coeffs.size());
  TrueEigenvalues out;
  for (int k = spec.first_lag(); k <= spec.last_lag(); ++k) out.lags.push_back(k);
  out.alpha = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(out.lags.size()));
  out.aggregate = Eigen::VectorXd::Zero(d);
  out.non_aggregate = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double theta = ar_coeffs[static_cast<std::size_t>(j)];
    for_each_shift(spec, [&](int k, int shift, double w) {
      out.alpha(j, k - spec.first_lag()) += w * ar_autocovariance(sigma_w2, theta, shift);
    });
    out.aggregate(j) = out.alpha.row(j).squaredNorm();
    for (int k = 1; k <= spec.max_lag; ++k) out.non_aggregate(j) += std::pow(ar_autocovariance(sigma_w2, theta, k), 2);
  }
  std::sort(out.aggregate.data(), out.aggregate.data() + d, std::greater<>());
  std::sort(out.non_aggregate.data(), out.non_aggregate.data() + d, std::greater<>());
  return out;
}

}  // namespace curvedim
