#pragma once

#include "curvedim/aggregate.hpp"
#include "curvedim/bootstrap.hpp"
#include "curvedim/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace curvedim {

/// Y_t = sum_l xi_tl sqrt2 cos(pi l x) + sum_{i<=d} Z_ti / 2^(i-1) sqrt2 sin(pi i x)
/// on [0, 1], xi_.l independent stationary AR(1) chains.
struct SimDesign {
  int d = 2;
  int n = 600;
  std::size_t grid_size = 256;
  double sigma_w2 = 1.5;
  int max_lag = 5;
  std::uint64_t seed = 0;
  std::optional<AggregationSpec> aggregation;
  bool noiseless = false;

  void validate() const;
};

/// theta_l = (-1)^l (0.9 - 0.5 l / d), l = 1..d.
[[nodiscard]] std::vector<double> ar_coefficients(int d);

/// n x d matrix of AR(1) scores started from the stationary law.
[[nodiscard]] Eigen::MatrixXd simulate_scores(const SimDesign& design);

/// Signal sqrt2 cos(pi l x) and noise sqrt2 sin(pi i x) sampled on `grid`.
[[nodiscard]] RowMatrix signal_basis(int d, const std::vector<double>& grid);
[[nodiscard]] RowMatrix noise_basis(int d, const std::vector<double>& grid);

/// The scores and the noise draw from separate streams of design.seed, so the
/// noiseless panel is the signal part of the noisy one.
[[nodiscard]] CurvePanel generate_panel(const SimDesign& design);

/// Wavelet set-up of the simulation study: Daub4, levels 5..7.
struct PipelineSpec {
  int wavelet_order = 4;
  int j0 = 5;
  int jmax = 7;
};

struct Table1Spec {
  std::vector<int> dims{2};
  std::vector<int> sizes{100, 600};
  std::vector<BootstrapMethod> methods{BootstrapMethod::Ordinary};
  int replicates = 50;
  std::uint64_t seed = 0;
  int max_lag = 5;
  PipelineSpec pipeline;
  BootstrapConfig bootstrap;  // method and seed are overridden per cell
  int workers = 1;
};

struct Table1Cell {
  int d = 0;
  int n = 0;
  BootstrapMethod method = BootstrapMethod::Ordinary;
  int replicates = 0;
  std::vector<int> histogram;   // histogram[k] = #replicates with d-hat = k, k = 0..d_max
  std::vector<int> selections;  // per replicate, in replicate order
  int capped = 0;

  [[nodiscard]] double rate(int k) const;
};

/// Selection histograms. Replicate r of cell (d, n) uses the same panel and
/// bootstrap seed for every method, so methods are compared on paired data.
[[nodiscard]] std::vector<Table1Cell> run_table1(const Table1Spec& spec);

struct Table2Spec {
  std::vector<int> dims{2, 4, 6};
  std::vector<int> sizes{100, 300, 600};
  int replicates = 100;
  std::uint64_t seed = 0;
  int max_lag = 5;
  double sigma_w2 = 1.5;
  AggregationSpec aggregation{3, {0.5, 0.3, 0.1}, 5};
  PipelineSpec pipeline;
  int top = 10;
  int workers = 1;
};

struct Table2Row {
  int d = 0;
  int n = 0;  // 0 marks the true-value row
  bool aggregated = false;
  Eigen::VectorXd values;  // averages of the `top` largest eigenvalues, or the true values
};

[[nodiscard]] std::vector<Table2Row> run_table2(const Table2Spec& spec);

struct ConvergenceSpec {
  int d = 2;
  std::vector<int> sizes{100, 300, 600};
  int replicates = 100;
  std::uint64_t seed = 0;
  double sigma_w2 = 1.5;
  AggregationSpec aggregation{3, {0.5, 0.3, 0.1}, 5};
  PipelineSpec pipeline;
  int workers = 1;
};

struct ConvergenceRow {
  int n = 0;
  Eigen::VectorXd mean_abs_error;  // mean |theta-hat_j - theta_j|, j = 1..d
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  Eigen::VectorXd true_values;
  double slope = 0.0;  // least-squares slope of log error_1 against log n
  static constexpr double reference_slope = -0.5;
};

[[nodiscard]] ConvergenceResult run_convergence(const ConvergenceSpec& spec);

/// Least-squares slope of log(y) on log(x).
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_table1_csv(std::ostream& out, const std::vector<Table1Cell>& cells);
void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows);
void write_convergence_csv(std::ostream& out, const ConvergenceResult& result);

}  // namespace curvedim
