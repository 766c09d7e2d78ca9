#pragma once

#include "curvedim/dimension.hpp"
#include "curvedim/random.hpp"
#include "curvedim/wavelet.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace curvedim {

enum class BootstrapMethod { Ordinary, ThresholdBefore, ThresholdedResidual, Wavestrap };

[[nodiscard]] std::string_view method_name(BootstrapMethod method) noexcept;
/// Accepts "ordinary", "threshold-before", "thresholded-residual", "wavestrap".
[[nodiscard]] BootstrapMethod parse_method(std::string_view name);

struct BootstrapConfig {
  BootstrapMethod method = BootstrapMethod::Ordinary;
  int replicates = 100;  // B
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int max_dimension = 10;  // d_max
  ThresholdRule threshold = ThresholdRule::universal();
  /// Build Y^b as fitted + donor residual instead of the coefficient-form
  /// update a^{t*} + sum_l (eta_tl - eta_{t*,l}) b^l. Both are the same
  /// quantity; the flag exists for sensitivity checks.
  bool literal_prose = false;
  int workers = 1;  // 0 = hardware concurrency; results do not depend on it

  void validate() const;
};

struct PValueResult {
  int d0 = 0;
  double p_value = 1.0;
  double statistic = 0.0;  // lambda-hat_{d0+1}
  std::size_t exceedances = 0;
  bool degenerate = false;  // statistic and every replicate are zero

  friend bool operator==(const PValueResult&, const PValueResult&) = default;
};

struct DimensionReport {
  int selected_d = 0;
  bool capped = false;  // every test up to d_max rejected
  std::vector<PValueResult> pvalues;
  Eigen::VectorXd eigenvalues;
  KernelEigen kernel;  // of the analysed coefficients
  BootstrapConfig config;
  int max_lag = 0;
};

/// The model imposed by H0: lambda_{d0+1} = 0, in coefficient space.
struct NullModel {
  Eigen::MatrixXd raw;        // a_j^t, J x n
  Eigen::VectorXd mean;       // a-bar (thresholded for ThresholdedResidual)
  Eigen::MatrixXd basis;      // b^1..b^d0 (thresholded for ThresholdedResidual)
  Eigen::MatrixXd scores;     // eta-hat, n x d0
  Eigen::MatrixXd fitted;     // mean + basis * scores^T
  Eigen::MatrixXd residuals;  // raw - fitted
  CoefficientLayout layout;
};

/// Coefficients the statistic is computed from: hard-thresholded under
/// ThresholdBefore, untouched otherwise.
[[nodiscard]] CoefficientPanel analysis_coefficients(const CoefficientPanel& raw, const BootstrapConfig& cfg);

[[nodiscard]] NullModel build_null_model(const CoefficientPanel& data, const KernelEigen& ke, int d0,
                                         const BootstrapConfig& cfg);

/// Resamples the detail coefficients of one residual with replacement inside
/// each detail level; approximation coefficients are kept.
[[nodiscard]] Eigen::VectorXd wavestrap_residual(const Eigen::VectorXd& residual, const CoefficientLayout& layout,
                                                 Rng& rng);

/// One bootstrap coefficient panel (J x n, uncentered).
[[nodiscard]] Eigen::MatrixXd bootstrap_sample(const NullModel& model, BootstrapMethod method, bool literal_prose,
                                               Rng& rng);

/// #{replicates > statistic} / (B + 1).
[[nodiscard]] double pvalue_from_count(std::size_t exceedances, int replicates) noexcept;

/// Bootstrap p-value of H0: lambda_{d0+1} = 0. `data` must be
/// analysis_coefficients(raw, cfg) and `ke` its kernel eigensystem.
/// Replicate r draws from the stream (cfg.seed, d0, r).
[[nodiscard]] PValueResult bootstrap_pvalue(const CoefficientPanel& data, const KernelEigen& ke, int d0,
                                            const BootstrapConfig& cfg);

/// Sequential test over d0 = 0, 1, ...; the first non-rejection (p > alpha)
/// gives the selected dimension.
[[nodiscard]] DimensionReport select_dimension(const CoefficientPanel& raw, const BootstrapConfig& cfg, int max_lag);

}  // namespace curvedim
