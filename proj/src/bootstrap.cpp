#include "curvedim/bootstrap.hpp"

#include "curvedim/error.hpp"
#include "curvedim/parallel.hpp"

#include <algorithm>
#include <string>

namespace curvedim {

std::string_view method_name(BootstrapMethod method) noexcept {
  switch (method) {
    case BootstrapMethod::Ordinary: return "ordinary";
    case BootstrapMethod::ThresholdBefore: return "threshold-before";
    case BootstrapMethod::ThresholdedResidual: return "thresholded-residual";
    case BootstrapMethod::Wavestrap: return "wavestrap";
  }
  return "unknown";
}

BootstrapMethod parse_method(std::string_view name) {
  for (auto m : {BootstrapMethod::Ordinary, BootstrapMethod::ThresholdBefore, BootstrapMethod::ThresholdedResidual,
                 BootstrapMethod::Wavestrap}) {
    if (name == method_name(m)) return m;
  }
  throw Error(Errc::InvalidMethod, "unknown bootstrap method '" + std::string(name) + "'");
}

void BootstrapConfig::validate() const {
  if (replicates < 19) throw Error(Errc::InvalidConfig, "bootstrap needs B >= 19 replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidConfig, "alpha must lie in (0, 1)");
  if (max_dimension < 1) throw Error(Errc::InvalidConfig, "d_max must be at least 1");
  if (threshold.kind == ThresholdRule::Kind::Fixed && !(threshold.lambda >= 0.0)) {
    throw Error(Errc::InvalidConfig, "fixed threshold must be non-negative");
  }
  switch (method) {
    case BootstrapMethod::Ordinary:
    case BootstrapMethod::ThresholdBefore:
    case BootstrapMethod::ThresholdedResidual:
    case BootstrapMethod::Wavestrap:
      break;
    default:
      throw Error(Errc::InvalidMethod, "invalid bootstrap method");
  }
}

CoefficientPanel analysis_coefficients(const CoefficientPanel& raw, const BootstrapConfig& cfg) {
  if (cfg.method == BootstrapMethod::ThresholdBefore) return hard_threshold(raw, cfg.threshold);
  return raw;
}

namespace {

void threshold_vector(Eigen::Ref<Eigen::VectorXd> v, const CoefficientLayout& layout, const ThresholdRule& rule,
                      std::size_t grid_size) {
  std::span<double> span(v.data(), static_cast<std::size_t>(v.size()));
  hard_threshold_inplace(span, layout, threshold_level(span, layout, rule, grid_size));
}

}  // namespace

NullModel build_null_model(const CoefficientPanel& data, const KernelEigen& ke, int d0, const BootstrapConfig& cfg) {
  if (d0 < 0 || d0 >= ke.eigenvectors.cols()) {
    throw Error(Errc::RankRequestTooLarge, "d0=" + std::to_string(d0) + " leaves no eigenvalue to test");
  }
  const FittedCurves fit = scores_and_fit(data, ke, d0);

  NullModel model;
  model.layout = data.layout;
  model.raw = data.coeffs;
  model.mean = fit.scores.mean_coeffs;
  model.basis = ke.eigenvectors.leftCols(d0);
  model.scores = fit.scores.eta;
  if (cfg.method == BootstrapMethod::ThresholdedResidual) {
    threshold_vector(model.mean, data.layout, cfg.threshold, data.grid_size);
    for (Eigen::Index l = 0; l < model.basis.cols(); ++l) {
      threshold_vector(model.basis.col(l), data.layout, cfg.threshold, data.grid_size);
    }
  }
  model.fitted.noalias() = model.basis * model.scores.transpose();
  model.fitted.colwise() += model.mean;
  model.residuals = model.raw - model.fitted;
  return model;
}

Eigen::VectorXd wavestrap_residual(const Eigen::VectorXd& residual, const CoefficientLayout& layout, Rng& rng) {
  Eigen::VectorXd out = residual;
  for (int j = layout.j0(); j <= layout.jmax(); ++j) {
    const auto blk = layout.detail(j);
    std::uniform_int_distribution<std::size_t> pick(0, blk.count - 1);
    for (std::size_t i = 0; i < blk.count; ++i) {
      out(static_cast<Eigen::Index>(blk.offset + i)) = residual(static_cast<Eigen::Index>(blk.offset + pick(rng)));
    }
  }
  return out;
}

Eigen::MatrixXd bootstrap_sample(const NullModel& model, BootstrapMethod method, bool literal_prose, Rng& rng) {
  const Eigen::Index n = model.raw.cols();
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Index> donor(static_cast<std::size_t>(n));
  for (auto& t : donor) t = pick(rng);

  Eigen::MatrixXd sample(model.raw.rows(), n);
  if (method == BootstrapMethod::Wavestrap) {
    for (Eigen::Index t = 0; t < n; ++t) {
      sample.col(t) = model.fitted.col(t) +
                      wavestrap_residual(model.residuals.col(donor[static_cast<std::size_t>(t)]), model.layout, rng);
    }
    return sample;
  }
  if (literal_prose) {
    for (Eigen::Index t = 0; t < n; ++t) {
      sample.col(t) = model.fitted.col(t) + model.residuals.col(donor[static_cast<std::size_t>(t)]);
    }
    return sample;
  }
  // a^{t*} + sum_l (eta_tl - eta_{t*,l}) b^l
  Eigen::MatrixXd score_shift(n, model.scores.cols());
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index src = donor[static_cast<std::size_t>(t)];
    sample.col(t) = model.raw.col(src);
    score_shift.row(t) = model.scores.row(t) - model.scores.row(src);
  }
  if (model.basis.cols() > 0) sample.noalias() += model.basis * score_shift.transpose();
  return sample;
}

double pvalue_from_count(std::size_t exceedances, int replicates) noexcept {
  return static_cast<double>(exceedances) / static_cast<double>(replicates + 1);
}

namespace {

// 'Exactly zero' up to rounding: D is quartic in the data, so residuals at
// machine precision give eigenvalues ~1e-32 * lambda_1.
constexpr double kZeroEigenvalue = 1e-12;

double replicate_statistic(const Eigen::MatrixXd& sample, int max_lag, int d0) {
  Eigen::MatrixXd centered = sample;
  centered.colwise() -= sample.rowwise().mean();
  const Eigen::VectorXd values = descending_eigenvalues(build_kernel_matrix(centered, max_lag));
  return values(d0);
}

}  // namespace

PValueResult bootstrap_pvalue(const CoefficientPanel& data, const KernelEigen& ke, int d0, const BootstrapConfig& cfg) {
  cfg.validate();
  const NullModel model = build_null_model(data, ke, d0, cfg);

  PValueResult result;
  result.d0 = d0;
  result.statistic = ke.eigenvalues(d0);

  std::vector<double> replicate(static_cast<std::size_t>(cfg.replicates));
  parallel_for(replicate.size(), cfg.workers, [&](std::size_t r) {
    Rng rng = make_stream(cfg.seed, {static_cast<std::uint64_t>(d0), static_cast<std::uint64_t>(r)});
    const Eigen::MatrixXd sample = bootstrap_sample(model, cfg.method, cfg.literal_prose, rng);
    replicate[r] = replicate_statistic(sample, ke.max_lag, d0);
  });

  result.exceedances = static_cast<std::size_t>(
      std::count_if(replicate.begin(), replicate.end(), [&](double v) { return v > result.statistic; }));
  result.p_value = pvalue_from_count(result.exceedances, cfg.replicates);

  const double lead = ke.eigenvalues.size() > 0 ? ke.eigenvalues(0) : 0.0;
  const double zero = kZeroEigenvalue * std::max(lead, 0.0);
  const bool all_zero = std::all_of(replicate.begin(), replicate.end(), [&](double v) { return v <= zero; });
  if (lead <= 0.0 || (result.statistic <= zero && all_zero)) {
    result.degenerate = true;
    result.p_value = 1.0;
  }
  return result;
}

DimensionReport select_dimension(const CoefficientPanel& raw, const BootstrapConfig& cfg, int max_lag) {
  cfg.validate();
  const CoefficientPanel data = analysis_coefficients(raw, cfg);
  const CenteredCoefficients cc = center_coefficients(data);
  const KernelEigen ke = estimate_kernel(cc.centered, max_lag);

  DimensionReport report;
  report.config = cfg;
  report.max_lag = max_lag;
  report.eigenvalues = ke.eigenvalues;
  report.kernel = ke;
  const int limit = std::min<int>(cfg.max_dimension, static_cast<int>(ke.eigenvalues.size()));
  for (int d0 = 0; d0 < limit; ++d0) {
    report.pvalues.push_back(bootstrap_pvalue(data, ke, d0, cfg));
    if (report.pvalues.back().p_value > cfg.alpha) {
      report.selected_d = d0;
      return report;
    }
  }
  report.selected_d = limit;
  report.capped = true;
  return report;
}

}  // namespace curvedim
