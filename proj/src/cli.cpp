#include "curvedim/cli.hpp"

#include "curvedim/aggregate.hpp"
#include "curvedim/bootstrap.hpp"
#include "curvedim/density.hpp"
#include "curvedim/error.hpp"
#include "curvedim/format.hpp"
#include "curvedim/io.hpp"
#include "curvedim/report.hpp"
#include "curvedim/simulation.hpp"
#include "curvedim/wavelet.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <sstream>

#ifndef CURVEDIM_VERSION
#define CURVEDIM_VERSION "0.0.0"
#endif

namespace curvedim {

namespace {

using json = nlohmann::json;

std::string output_format(const RunConfig& cfg) {
  if (!cfg.format.empty()) return cfg.format;
  return cfg.command == "simulate" || cfg.command == "experiment" ? "csv" : "json";
}

void require_format(const RunConfig& cfg, std::initializer_list<std::string_view> allowed) {
  const std::string fmt = output_format(cfg);
  for (auto a : allowed) {
    if (fmt == a) return;
  }
  throw Error(Errc::InvalidConfig, "format '" + fmt + "' is not available for " + cfg.command);
}

ThresholdRule parse_threshold(const std::string& text) {
  if (text == "universal") return ThresholdRule::universal();
  double lambda = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), lambda);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(lambda >= 0.0)) {
    throw Error(Errc::InvalidConfig, "threshold must be 'universal' or a non-negative number, got '" + text + "'");
  }
  return ThresholdRule::fixed(lambda);
}

WaveletSystem wavelet_system(const RunConfig& cfg) {
  return build_wavelet_system(parse_wavelet_family(cfg.wavelet), cfg.j0, cfg.jmax);
}

std::string wavelet_name(const RunConfig& cfg) { return "daub" + std::to_string(parse_wavelet_family(cfg.wavelet)); }

BootstrapConfig bootstrap_config(const RunConfig& cfg) {
  BootstrapConfig b;
  b.method = parse_method(cfg.method);
  b.replicates = cfg.bootstrap_replicates;
  b.alpha = cfg.alpha;
  b.seed = cfg.seed;
  b.max_dimension = cfg.d_max;
  b.threshold = parse_threshold(cfg.threshold);
  b.literal_prose = cfg.literal_prose;
  b.workers = cfg.threads;
  b.validate();
  return b;
}

AggregationSpec aggregation_spec(const RunConfig& cfg) {
  AggregationSpec spec{cfg.delta, cfg.weights, cfg.max_lag};
  spec.validate();
  return spec;
}

struct ExperimentPlan {
  std::vector<int> dims;
  std::vector<int> sizes;
  std::vector<std::string> methods;
  int replicates = 0;
};

ExperimentPlan experiment_plan(const RunConfig& cfg) {
  ExperimentPlan plan;
  if (cfg.experiment == "table1") {
    plan = {{2}, {100, 600}, {"ordinary"}, 50};
  } else if (cfg.experiment == "table2") {
    plan = {{2, 4, 6}, {100, 300, 600}, {}, 100};
  } else if (cfg.experiment == "convergence") {
    plan = {{2}, {100, 300, 600}, {}, 100};
  } else {
    throw Error(Errc::InvalidConfig, "unknown experiment '" + cfg.experiment + "'");
  }
  if (!cfg.dims.empty()) plan.dims = cfg.dims;
  if (!cfg.sizes.empty()) plan.sizes = cfg.sizes;
  if (!cfg.methods.empty() && cfg.experiment == "table1") plan.methods = cfg.methods;
  if (cfg.replicates != 0) plan.replicates = cfg.replicates;
  if (plan.replicates < 1) throw Error(Errc::InvalidConfig, "replicates must be at least 1");
  if (cfg.experiment == "convergence" && plan.dims.size() != 1) {
    throw Error(Errc::InvalidConfig, "convergence takes a single dimension");
  }
  for (int d : plan.dims) {
    if (d < 1) throw Error(Errc::InvalidConfig, "dimensions must be positive");
  }
  return plan;
}

json pipeline_echo(const RunConfig& cfg) {
  return {{"wavelet", wavelet_name(cfg)}, {"j0", cfg.j0}, {"jmax", cfg.jmax}, {"p", cfg.max_lag}};
}

void merge(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

json bootstrap_echo(const RunConfig& cfg) {
  return {{"method", cfg.method},         {"B", cfg.bootstrap_replicates}, {"alpha", cfg.alpha},
          {"d_max", cfg.d_max},           {"threshold", cfg.threshold},    {"literal_prose", cfg.literal_prose}};
}

std::string render(const json& doc) { return dump_report(doc); }

void stamp(json& doc, const RunConfig& cfg) {
  if (cfg.timestamp) doc["timestamp"] = utc_timestamp();
}

std::vector<std::vector<double>> rows_of(const RowMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string eigenvalue_csv(const std::vector<double>& values) {
  std::ostringstream out;
  const std::vector<double> normalized = normalized_percent(values);
  out << "index,eigenvalue,normalized\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << i + 1 << ',' << format_number(values[i]) << ',' << format_number(normalized[i]) << '\n';
  }
  return out.str();
}

json base_document(const RunConfig& cfg) {
  return {{"schema", kReportSchema},
          {"version", CURVEDIM_VERSION},
          {"command", cfg.command},
          {"seed", cfg.seed},
          {"config", config_echo(cfg)}};
}

std::string run_estimate(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const BootstrapConfig bcfg = bootstrap_config(cfg);
  const WaveletSystem sys = wavelet_system(cfg);
  const IngestedPanel in = ingest_curves(cfg.input, cfg.max_lag + 2);
  const CoefficientPanel coeffs = decompose(in.panel, sys);
  const DimensionReport dim = select_dimension(coeffs, bcfg, cfg.max_lag);

  EstimateReport r;
  r.version = CURVEDIM_VERSION;
  r.seed = cfg.seed;
  r.config = config_echo(cfg);
  r.resampled = in.resampled;
  r.source_grid_size = in.source_grid_size;
  r.grid = in.panel.grid;
  r.curves = in.panel.curve_count();
  r.eigenvalues = to_vector(dim.eigenvalues);
  r.normalized = normalized_percent(r.eigenvalues);
  r.selected_d = dim.selected_d;
  r.capped = dim.capped;
  r.pvalues = dim.pvalues;
  if (dim.selected_d > 0) {
    r.eigenfunctions = rows_of(eigenfunctions(dim.kernel, sys, in.panel.grid, dim.selected_d).values);
    const FittedCurves fit = scores_and_fit(analysis_coefficients(coeffs, bcfg), dim.kernel, dim.selected_d);
    for (Eigen::Index t = 0; t < fit.scores.eta.rows(); ++t) {
      const Eigen::VectorXd row = fit.scores.eta.row(t).transpose();
      r.scores.push_back(to_vector(row));
    }
  }
  if (cfg.timestamp) r.timestamp = utc_timestamp();
  if (output_format(cfg) == "csv") return eigenvalue_csv(r.eigenvalues);
  return render(to_json(r));
}

std::string run_aggregate(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const AggregationSpec spec = aggregation_spec(cfg);
  const WaveletSystem sys = wavelet_system(cfg);
  const IngestedPanel in = ingest_curves(cfg.input, cfg.max_lag + cfg.delta + 1);
  if (cfg.components < 0) throw Error(Errc::InvalidConfig, "components must be non-negative");
  const AggregateKernelEigen agg = estimate_aggregate_kernel(in.panel, sys, spec, cfg.kstar);
  const std::vector<double> values = to_vector(agg.eigenvalues);
  if (output_format(cfg) == "csv") return eigenvalue_csv(values);

  json doc = base_document(cfg);
  doc["resampled"] = in.resampled;
  doc["source_grid_size"] = in.source_grid_size;
  doc["curves"] = in.panel.curve_count();
  doc["effective_size"] = agg.effective_size;
  doc["grid"] = in.panel.grid;
  doc["eigenvalues"] = values;
  doc["normalized_eigenvalues"] = normalized_percent(values);
  if (cfg.kstar) doc["kstar_eigenvalues"] = to_vector(agg.kstar_values);
  doc["eigenfunctions"] = cfg.components > 0 ? rows_of(kstar_eigenfunctions(in.panel, spec, cfg.components).values)
                                             : std::vector<std::vector<double>>{};
  stamp(doc, cfg);
  return render(doc);
}

std::string run_simulate(const RunConfig& cfg) {
  require_format(cfg, {"csv"});
  SimDesign design;
  design.d = cfg.d;
  design.n = cfg.n;
  design.grid_size = cfg.grid;
  design.sigma_w2 = cfg.sigma_w2;
  design.max_lag = cfg.max_lag;
  design.seed = cfg.seed;
  design.noiseless = cfg.noiseless;
  std::ostringstream out;
  write_curves_csv(out, generate_panel(design));
  return out.str();
}

PipelineSpec pipeline_spec(const RunConfig& cfg) {
  (void)wavelet_system(cfg);
  return {parse_wavelet_family(cfg.wavelet), cfg.j0, cfg.jmax};
}

std::string run_experiment(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const ExperimentPlan plan = experiment_plan(cfg);
  const bool csv = output_format(cfg) == "csv";
  std::ostringstream out;
  json doc = base_document(cfg);

  if (cfg.experiment == "table1") {
    Table1Spec spec;
    spec.dims = plan.dims;
    spec.sizes = plan.sizes;
    spec.methods.clear();
    for (const auto& m : plan.methods) spec.methods.push_back(parse_method(m));
    spec.replicates = plan.replicates;
    spec.seed = cfg.seed;
    spec.max_lag = cfg.max_lag;
    spec.pipeline = pipeline_spec(cfg);
    spec.bootstrap = bootstrap_config(cfg);
    spec.workers = cfg.threads;
    const std::vector<Table1Cell> cells = run_table1(spec);
    if (csv) {
      write_table1_csv(out, cells);
      return out.str();
    }
    json list = json::array();
    for (const auto& c : cells) {
      std::vector<double> rates;
      for (std::size_t k = 0; k < c.histogram.size(); ++k) rates.push_back(c.rate(static_cast<int>(k)));
      list.push_back({{"d", c.d},
                      {"n", c.n},
                      {"method", method_name(c.method)},
                      {"replicates", c.replicates},
                      {"histogram", c.histogram},
                      {"rates", rates},
                      {"selections", c.selections},
                      {"capped", c.capped}});
    }
    doc["cells"] = std::move(list);
  } else if (cfg.experiment == "table2") {
    Table2Spec spec;
    spec.dims = plan.dims;
    spec.sizes = plan.sizes;
    spec.replicates = plan.replicates;
    spec.seed = cfg.seed;
    spec.max_lag = cfg.max_lag;
    spec.aggregation.max_lag = cfg.max_lag;
    spec.pipeline = pipeline_spec(cfg);
    spec.workers = cfg.threads;
    const std::vector<Table2Row> rows = run_table2(spec);
    if (csv) {
      write_table2_csv(out, rows);
      return out.str();
    }
    json list = json::array();
    for (const auto& r : rows) {
      list.push_back({{"method", r.aggregated ? "aggregate" : "non-aggregate"},
                      {"d", r.d},
                      {"n", r.n == 0 ? json("true") : json(r.n)},
                      {"values", to_vector(r.values)}});
    }
    doc["rows"] = std::move(list);
  } else {
    ConvergenceSpec spec;
    spec.d = plan.dims.front();
    spec.sizes = plan.sizes;
    spec.replicates = plan.replicates;
    spec.seed = cfg.seed;
    spec.aggregation.max_lag = cfg.max_lag;
    spec.pipeline = pipeline_spec(cfg);
    spec.workers = cfg.threads;
    const ConvergenceResult res = run_convergence(spec);
    if (csv) {
      write_convergence_csv(out, res);
      return out.str();
    }
    json list = json::array();
    for (const auto& r : res.rows) list.push_back({{"n", r.n}, {"mean_abs_error", to_vector(r.mean_abs_error)}});
    doc["rows"] = std::move(list);
    doc["true_values"] = to_vector(res.true_values);
    doc["slope"] = res.slope;
    doc["reference_slope"] = ConvergenceResult::reference_slope;
  }
  stamp(doc, cfg);
  return render(doc);
}

std::string run_density(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  if (cfg.input_kind != "density" && cfg.input_kind != "sqrt") {
    throw Error(Errc::InvalidConfig, "input kind must be 'density' or 'sqrt'");
  }
  const WaveletSystem sys = wavelet_system(cfg);
  const IngestedPanel in = ingest_curves(cfg.input, 1);
  const CurvePanel roots = cfg.input_kind == "density" ? sqrt_density_panel(in.panel) : in.panel;

  CurvePanel densities = in.panel;
  std::vector<double> integrals;
  std::vector<double> minima;
  for (Eigen::Index t = 0; t < roots.values.rows(); ++t) {
    const Eigen::VectorXd row = roots.values.row(t).transpose();
    const SqrtDensityCurve curve =
        sqrt_density_from_samples({row.data(), static_cast<std::size_t>(row.size())}, sys, roots.a, roots.b);
    const CurvePanel dens = square_to_density(curve, sys);
    densities.values.row(t) = dens.values.row(0);
    integrals.push_back(integrate({dens.values.data(), static_cast<std::size_t>(dens.values.cols())},
                                  densities.spacing()));
    minima.push_back(dens.values.minCoeff());
  }
  if (output_format(cfg) == "csv") {
    std::ostringstream out;
    write_curves_csv(out, densities);
    return out.str();
  }
  json doc = base_document(cfg);
  doc["resampled"] = in.resampled;
  doc["source_grid_size"] = in.source_grid_size;
  doc["grid"] = densities.grid;
  doc["densities"] = rows_of(densities.values);
  doc["integrals"] = integrals;
  doc["minima"] = minima;
  stamp(doc, cfg);
  return render(doc);
}

}  // namespace

json config_echo(const RunConfig& cfg) {
  json echo = {{"command", cfg.command}, {"seed", cfg.seed}, {"timestamp", cfg.timestamp},
               {"format", output_format(cfg)}};
  if (cfg.command == "estimate") {
    echo["input"] = cfg.input;
    merge(echo, pipeline_echo(cfg));
    merge(echo, bootstrap_echo(cfg));
  } else if (cfg.command == "aggregate") {
    echo["input"] = cfg.input;
    merge(echo, pipeline_echo(cfg));
    echo["delta"] = cfg.delta;
    echo["weights"] = cfg.weights;
    echo["kstar"] = cfg.kstar;
    echo["components"] = cfg.components;
  } else if (cfg.command == "simulate") {
    echo["d"] = cfg.d;
    echo["n"] = cfg.n;
    echo["grid"] = cfg.grid;
    echo["sigma_w2"] = cfg.sigma_w2;
    echo["p"] = cfg.max_lag;
    echo["noiseless"] = cfg.noiseless;
  } else if (cfg.command == "experiment") {
    const ExperimentPlan plan = experiment_plan(cfg);
    echo["experiment"] = cfg.experiment;
    merge(echo, pipeline_echo(cfg));
    echo["dims"] = plan.dims;
    echo["sizes"] = plan.sizes;
    echo["replicates"] = plan.replicates;
    if (cfg.experiment == "table1") {
      echo["methods"] = plan.methods;
      merge(echo, bootstrap_echo(cfg));
      echo.erase("method");
    } else {
      const Table2Spec defaults;
      echo["sigma_w2"] = defaults.sigma_w2;
      echo["delta"] = defaults.aggregation.delta;
      echo["weights"] = defaults.aggregation.weights;
    }
  } else if (cfg.command == "density") {
    echo["input"] = cfg.input;
    echo["input_kind"] = cfg.input_kind;
    merge(echo, pipeline_echo(cfg));
    echo.erase("p");
  }
  return echo;
}

int run(const RunConfig& cfg, std::ostream& diag) {
  try {
    std::string content;
    if (cfg.command == "estimate") {
      content = run_estimate(cfg);
    } else if (cfg.command == "aggregate") {
      content = run_aggregate(cfg);
    } else if (cfg.command == "simulate") {
      content = run_simulate(cfg);
    } else if (cfg.command == "experiment") {
      content = run_experiment(cfg);
    } else if (cfg.command == "density") {
      content = run_density(cfg);
    } else {
      throw Error(Errc::InvalidConfig, "unknown command '" + cfg.command + "'");
    }
    write_output(cfg.output, content);
    return 0;
  } catch (const Error& e) {
    diag << "curvedim: " << e.what() << '\n';
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    diag << "curvedim: internal error: " << e.what() << '\n';
    return 3;
  }
}

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, bool timestamped) {
  sub->add_option("--seed", cfg.seed, "master seed")->envname("CURVEDIM_SEED")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "worker threads, 0 = all cores")->capture_default_str();
  sub->add_option("--out", cfg.output, "output file, - for stdout")->capture_default_str();
  if (timestamped) sub->add_flag("!--no-timestamp", cfg.timestamp, "omit the timestamp field");
}

void add_pipeline(CLI::App* sub, RunConfig& cfg, bool with_lag) {
  sub->add_option("--wavelet", cfg.wavelet, "Daubechies family daub1..daub10")->capture_default_str();
  sub->add_option("--j0", cfg.j0, "coarsest level")->capture_default_str();
  sub->add_option("--jmax", cfg.jmax, "finest level")->capture_default_str();
  if (with_lag) sub->add_option("--p", cfg.max_lag, "maximum lag")->capture_default_str();
}

void add_bootstrap(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--B", cfg.bootstrap_replicates, "bootstrap replicates")->capture_default_str();
  sub->add_option("--alpha", cfg.alpha, "significance level")->capture_default_str();
  sub->add_option("--d-max", cfg.d_max, "largest dimension tested")->capture_default_str();
  sub->add_option("--threshold", cfg.threshold, "universal or a fixed level")->capture_default_str();
  sub->add_flag("--literal-prose", cfg.literal_prose, "bootstrap curves as fitted + resampled residual");
}

void add_format(CLI::App* sub, RunConfig& cfg, const std::string& fallback) {
  sub->add_option("--format", cfg.format, "json or csv (default " + fallback + ")")
      ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& diag) {
  RunConfig cfg;
  CLI::App app{"Dimension estimation for time series of curves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CURVEDIM_VERSION);

  auto* estimate = app.add_subcommand("estimate", "select the dimension of a curve panel by bootstrap tests");
  estimate->add_option("--input", cfg.input, "CSV: grid row, then one curve per row")->required();
  add_pipeline(estimate, cfg, true);
  estimate->add_option("--method", cfg.method, "ordinary, threshold-before, thresholded-residual, wavestrap")
      ->capture_default_str();
  add_bootstrap(estimate, cfg);
  add_format(estimate, cfg, "json");
  add_common(estimate, cfg, true);

  auto* aggregate = app.add_subcommand("aggregate", "eigenvalues of the aggregate kernel");
  aggregate->add_option("--input", cfg.input, "CSV: grid row, then one curve per row")->required();
  add_pipeline(aggregate, cfg, true);
  aggregate->add_option("--delta", cfg.delta, "aggregation window")->capture_default_str();
  aggregate->add_option("--weights", cfg.weights, "omega_0,...,omega_{delta-1}")->delimiter(',')->capture_default_str();
  aggregate->add_flag("--kstar", cfg.kstar, "also report the K* eigenvalues");
  aggregate->add_option("--components", cfg.components, "orthonormal eigenfunctions to report")->capture_default_str();
  add_format(aggregate, cfg, "json");
  add_common(aggregate, cfg, true);

  auto* simulate = app.add_subcommand("simulate", "write a synthetic panel as CSV");
  simulate->add_option("--d", cfg.d, "true dimension")->capture_default_str();
  simulate->add_option("--n", cfg.n, "number of curves")->capture_default_str();
  simulate->add_option("--grid", cfg.grid, "grid points (power of two)")->capture_default_str();
  simulate->add_option("--sigma-w2", cfg.sigma_w2, "AR innovation variance")->capture_default_str();
  simulate->add_option("--p", cfg.max_lag, "maximum lag the panel must support")->capture_default_str();
  simulate->add_flag("--noiseless", cfg.noiseless, "omit the noise term");
  add_common(simulate, cfg, false);

  auto* experiment = app.add_subcommand("experiment", "simulation study: table1, table2 or convergence");
  experiment->add_option("kind", cfg.experiment, "table1 | table2 | convergence")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "convergence"}));
  experiment->add_option("--dims", cfg.dims, "true dimensions")->delimiter(',');
  experiment->add_option("--sizes", cfg.sizes, "sample sizes")->delimiter(',');
  experiment->add_option("--methods", cfg.methods, "bootstrap methods (table1)")->delimiter(',');
  experiment->add_option("--replicates", cfg.replicates, "Monte Carlo replicates, 0 = experiment default")
      ->capture_default_str();
  add_pipeline(experiment, cfg, true);
  add_bootstrap(experiment, cfg);
  add_format(experiment, cfg, "csv");
  add_common(experiment, cfg, true);

  auto* density = app.add_subcommand("density", "bona fide densities from (square-root) density curves");
  density->add_option("--input", cfg.input, "CSV: grid row, then one curve per row")->required();
  density->add_option("--input-kind", cfg.input_kind, "density or sqrt")
      ->check(CLI::IsMember({"density", "sqrt"}))
      ->capture_default_str();
  add_pipeline(density, cfg, false);
  add_format(density, cfg, "json");
  add_common(density, cfg, true);

  std::vector<const char*> argv{"curvedim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diag << "curvedim: " << e.what() << '\n';
    return 2;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return run(cfg, diag);
}

}  // namespace curvedim
