#include "curvedim/simulation.hpp"

#include "curvedim/error.hpp"
#include "curvedim/format.hpp"
#include "curvedim/parallel.hpp"
#include "curvedim/random.hpp"
#include "curvedim/wavelet.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace curvedim {

namespace {

// Stream tags keep the experiments from sharing random numbers.
constexpr std::uint64_t kScoreStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kTable1Panel = 11;
constexpr std::uint64_t kTable1Bootstrap = 12;
constexpr std::uint64_t kTable2Panel = 21;
constexpr std::uint64_t kConvergencePanel = 31;

std::uint64_t key(int v) { return static_cast<std::uint64_t>(v); }

}  // namespace

void SimDesign::validate() const {
  if (d < 1) throw Error(Errc::InvalidConfig, "dimension d must be at least 1");
  if (max_lag < 1) throw Error(Errc::InvalidConfig, "p must be at least 1");
  if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) throw Error(Errc::InvalidConfig, "sigma_w2 must be positive");
  if (grid_size < 2 || !is_power_of_two(grid_size)) {
    throw Error(Errc::GridNotDyadic, "grid size " + std::to_string(grid_size) + " is not a power of two");
  }
  const int extra = aggregation ? aggregation->delta - 1 : 0;
  if (n <= max_lag + extra) {
    throw Error(Errc::TooFewCurves, "n=" + std::to_string(n) + " must exceed p + delta - 1 = " +
                                        std::to_string(max_lag + extra));
  }
}

std::vector<double> ar_coefficients(int d) {
  if (d < 1) throw Error(Errc::InvalidConfig, "dimension d must be at least 1");
  std::vector<double> theta(static_cast<std::size_t>(d));
  for (int l = 1; l <= d; ++l) {
    theta[static_cast<std::size_t>(l - 1)] = (l % 2 == 0 ? 1.0 : -1.0) * (0.9 - 0.5 * l / d);
  }
  return theta;
}

Eigen::MatrixXd simulate_scores(const SimDesign& design) {
  design.validate();
  const std::vector<double> theta = ar_coefficients(design.d);
  Rng rng = make_stream(design.seed, {kScoreStream});
  std::normal_distribution<double> gauss;
  const double sd = std::sqrt(design.sigma_w2);

  Eigen::MatrixXd xi(design.n, design.d);
  for (int l = 0; l < design.d; ++l) {
    const double th = theta[static_cast<std::size_t>(l)];
    xi(0, l) = gauss(rng) * sd / std::sqrt(1.0 - th * th);
  }
  for (int t = 1; t < design.n; ++t) {
    for (int l = 0; l < design.d; ++l) xi(t, l) = theta[static_cast<std::size_t>(l)] * xi(t - 1, l) + sd * gauss(rng);
  }
  return xi;
}

RowMatrix signal_basis(int d, const std::vector<double>& grid) {
  RowMatrix basis(d, static_cast<Eigen::Index>(grid.size()));
  for (int l = 1; l <= d; ++l) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      basis(l - 1, static_cast<Eigen::Index>(i)) = std::numbers::sqrt2 * std::cos(std::numbers::pi * l * grid[i]);
    }
  }
  return basis;
}

RowMatrix noise_basis(int d, const std::vector<double>& grid) {
  RowMatrix basis(d, static_cast<Eigen::Index>(grid.size()));
  for (int l = 1; l <= d; ++l) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      basis(l - 1, static_cast<Eigen::Index>(i)) = std::numbers::sqrt2 * std::sin(std::numbers::pi * l * grid[i]);
    }
  }
  return basis;
}

CurvePanel generate_panel(const SimDesign& design) {
  const Eigen::MatrixXd xi = simulate_scores(design);
  CurvePanel panel;
  panel.grid = uniform_grid(0.0, 1.0, design.grid_size);
  panel.a = 0.0;
  panel.b = 1.0;
  panel.values.noalias() = xi * signal_basis(design.d, panel.grid);
  if (!design.noiseless) {
    Rng rng = make_stream(design.seed, {kNoiseStream});
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd z(design.n, design.d);
    for (int t = 0; t < design.n; ++t) {
      for (int i = 0; i < design.d; ++i) z(t, i) = gauss(rng) / std::ldexp(1.0, i);
    }
    panel.values.noalias() += z * noise_basis(design.d, panel.grid);
  }
  return panel;
}

double Table1Cell::rate(int k) const {
  if (replicates == 0 || k < 0 || k >= static_cast<int>(histogram.size())) return 0.0;
  return static_cast<double>(histogram[static_cast<std::size_t>(k)]) / replicates;
}

std::vector<Table1Cell> run_table1(const Table1Spec& spec) {
  if (spec.replicates < 1) throw Error(Errc::InvalidConfig, "replicates must be at least 1");
  if (spec.methods.empty()) throw Error(Errc::InvalidConfig, "no bootstrap method selected");
  spec.bootstrap.validate();
  const WaveletSystem sys = build_wavelet_system(spec.pipeline.wavelet_order, spec.pipeline.j0, spec.pipeline.jmax);
  const std::size_t methods = spec.methods.size();
  const auto reps = static_cast<std::size_t>(spec.replicates);

  std::vector<Table1Cell> cells;
  for (int d : spec.dims) {
    for (int n : spec.sizes) {
      std::vector<int> selected(methods * reps);
      std::vector<char> capped(methods * reps);
      parallel_for(reps, spec.workers, [&](std::size_t r) {
        SimDesign design;
        design.d = d;
        design.n = n;
        design.max_lag = spec.max_lag;
        design.seed = stream_seed(spec.seed, {kTable1Panel, key(d), key(n), r});
        const CoefficientPanel coeffs = decompose(generate_panel(design), sys);
        for (std::size_t m = 0; m < methods; ++m) {
          BootstrapConfig cfg = spec.bootstrap;
          cfg.method = spec.methods[m];
          cfg.seed = stream_seed(spec.seed, {kTable1Bootstrap, key(d), key(n), r});
          cfg.workers = 1;
          const DimensionReport report = select_dimension(coeffs, cfg, spec.max_lag);
          selected[m * reps + r] = report.selected_d;
          capped[m * reps + r] = report.capped ? 1 : 0;
        }
      });
      for (std::size_t m = 0; m < methods; ++m) {
        Table1Cell cell;
        cell.d = d;
        cell.n = n;
        cell.method = spec.methods[m];
        cell.replicates = spec.replicates;
        cell.histogram.assign(static_cast<std::size_t>(spec.bootstrap.max_dimension) + 1, 0);
        for (std::size_t r = 0; r < reps; ++r) {
          const int s = selected[m * reps + r];
          cell.selections.push_back(s);
          ++cell.histogram[static_cast<std::size_t>(s)];
          cell.capped += capped[m * reps + r];
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

namespace {

Eigen::VectorXd top_values(const Eigen::VectorXd& values, int top) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(top);
  const Eigen::Index count = std::min<Eigen::Index>(top, values.size());
  out.head(count) = values.head(count);
  return out;
}

}  // namespace

std::vector<Table2Row> run_table2(const Table2Spec& spec) {
  if (spec.replicates < 1) throw Error(Errc::InvalidConfig, "replicates must be at least 1");
  if (spec.top < 1) throw Error(Errc::InvalidConfig, "top must be at least 1");
  AggregationSpec agg = spec.aggregation;
  agg.max_lag = spec.max_lag;
  agg.validate();
  const WaveletSystem sys = build_wavelet_system(spec.pipeline.wavelet_order, spec.pipeline.j0, spec.pipeline.jmax);
  const auto reps = static_cast<std::size_t>(spec.replicates);

  std::vector<Table2Row> aggregated;
  std::vector<Table2Row> plain;
  for (int d : spec.dims) {
    for (int n : spec.sizes) {
      std::vector<Eigen::VectorXd> agg_values(reps);
      std::vector<Eigen::VectorXd> plain_values(reps);
      parallel_for(reps, spec.workers, [&](std::size_t r) {
        SimDesign design;
        design.d = d;
        design.n = n;
        design.max_lag = spec.max_lag;
        design.sigma_w2 = spec.sigma_w2;
        design.aggregation = agg;
        design.seed = stream_seed(spec.seed, {kTable2Panel, key(d), key(n), r});
        const CenteredCoefficients cc = center_coefficients(decompose(generate_panel(design), sys));
        plain_values[r] = top_values(descending_eigenvalues(build_kernel_matrix(cc.centered.coeffs, spec.max_lag)),
                                     spec.top);
        agg_values[r] = top_values(descending_eigenvalues(build_aggregate_D(cc.centered.coeffs, agg)), spec.top);
      });
      Eigen::VectorXd agg_mean = Eigen::VectorXd::Zero(spec.top);
      Eigen::VectorXd plain_mean = Eigen::VectorXd::Zero(spec.top);
      for (std::size_t r = 0; r < reps; ++r) {
        agg_mean += agg_values[r];
        plain_mean += plain_values[r];
      }
      aggregated.push_back({d, n, true, agg_mean / static_cast<double>(reps)});
      plain.push_back({d, n, false, plain_mean / static_cast<double>(reps)});
    }
    const TrueEigenvalues truth = true_alpha(spec.sigma_w2, ar_coefficients(d), agg);
    aggregated.push_back({d, 0, true, top_values(truth.aggregate, spec.top)});
    plain.push_back({d, 0, false, top_values(truth.non_aggregate, spec.top)});
  }
  aggregated.insert(aggregated.end(), plain.begin(), plain.end());
  return aggregated;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidConfig, "slope needs at least two points");
  const auto k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ConvergenceResult run_convergence(const ConvergenceSpec& spec) {
  if (spec.sizes.size() < 2) throw Error(Errc::InvalidConfig, "convergence needs at least two sample sizes");
  if (spec.replicates < 1) throw Error(Errc::InvalidConfig, "replicates must be at least 1");
  spec.aggregation.validate();
  const WaveletSystem sys = build_wavelet_system(spec.pipeline.wavelet_order, spec.pipeline.j0, spec.pipeline.jmax);
  const auto reps = static_cast<std::size_t>(spec.replicates);

  ConvergenceResult result;
  result.true_values = true_alpha(spec.sigma_w2, ar_coefficients(spec.d), spec.aggregation).aggregate;
  std::vector<double> ns;
  std::vector<double> lead;
  for (int n : spec.sizes) {
    std::vector<Eigen::VectorXd> errors(reps);
    parallel_for(reps, spec.workers, [&](std::size_t r) {
      SimDesign design;
      design.d = spec.d;
      design.n = n;
      design.max_lag = spec.aggregation.max_lag;
      design.sigma_w2 = spec.sigma_w2;
      design.aggregation = spec.aggregation;
      design.seed = stream_seed(spec.seed, {kConvergencePanel, key(spec.d), key(n), r});
      const CenteredCoefficients cc = center_coefficients(decompose(generate_panel(design), sys));
      const Eigen::VectorXd theta = descending_eigenvalues(build_aggregate_D(cc.centered.coeffs, spec.aggregation));
      errors[r] = (theta.head(spec.d) - result.true_values).cwiseAbs();
    });
    ConvergenceRow row;
    row.n = n;
    row.mean_abs_error = Eigen::VectorXd::Zero(spec.d);
    for (const auto& e : errors) row.mean_abs_error += e;
    row.mean_abs_error /= static_cast<double>(reps);
    ns.push_back(n);
    lead.push_back(row.mean_abs_error(0));
    result.rows.push_back(std::move(row));
  }
  result.slope = loglog_slope(ns, lead);
  return result;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Cell>& cells) {
  out << "d,n,method,replicates,dhat,count,rate\n";
  for (const auto& c : cells) {
    for (std::size_t k = 0; k < c.histogram.size(); ++k) {
      out << c.d << ',' << c.n << ',' << method_name(c.method) << ',' << c.replicates << ',' << k << ','
          << c.histogram[k] << ',' << format_number(c.rate(static_cast<int>(k))) << '\n';
    }
  }
}

void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows) {
  const Eigen::Index top = rows.empty() ? 0 : rows.front().values.size();
  out << "method,d,n";
  for (Eigen::Index j = 1; j <= top; ++j) out << ",theta_" << j;
  out << '\n';
  for (const auto& r : rows) {
    out << (r.aggregated ? "aggregate" : "non-aggregate") << ',' << r.d << ',';
    if (r.n == 0) {
      out << "true";
    } else {
      out << r.n;
    }
    for (Eigen::Index j = 0; j < r.values.size(); ++j) out << ',' << format_number(r.values(j));
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result) {
  const Eigen::Index d = result.true_values.size();
  out << "n";
  for (Eigen::Index j = 1; j <= d; ++j) out << ",mean_abs_error_" << j;
  out << ",reference_n^-1/2\n";
  if (result.rows.empty()) return;
  const double n0 = result.rows.front().n;
  const double e0 = result.rows.front().mean_abs_error(0);
  for (const auto& row : result.rows) {
    out << row.n;
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << format_number(row.mean_abs_error(j));
    out << ',' << format_number(e0 * std::pow(row.n / n0, ConvergenceResult::reference_slope)) << '\n';
  }
}

}  // namespace curvedim
