#include "curvedim/report.hpp"

#include "curvedim/error.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

namespace curvedim {

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json doc;
  doc["schema"] = kReportSchema;
  doc["version"] = r.version;
  doc["command"] = "estimate";
  doc["seed"] = r.seed;
  doc["config"] = r.config;
  doc["resampled"] = r.resampled;
  doc["source_grid_size"] = r.source_grid_size;
  doc["grid"] = r.grid;
  doc["curves"] = r.curves;
  doc["eigenvalues"] = r.eigenvalues;
  doc["normalized_eigenvalues"] = r.normalized;
  doc["selected_d"] = r.selected_d;
  doc["capped"] = r.capped;
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& p : r.pvalues) {
    ladder.push_back({{"d0", p.d0},
                      {"p_value", p.p_value},
                      {"statistic", p.statistic},
                      {"exceedances", p.exceedances},
                      {"degenerate", p.degenerate}});
  }
  doc["pvalues"] = std::move(ladder);
  doc["eigenfunctions"] = r.eigenfunctions;
  doc["scores"] = r.scores;
  if (r.timestamp) doc["timestamp"] = *r.timestamp;
  return doc;
}

EstimateReport estimate_report_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kReportSchema) {
      throw Error(Errc::InvalidConfig, "unsupported report schema " + doc.at("schema").get<std::string>());
    }
    EstimateReport r;
    r.version = doc.at("version").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.config = doc.at("config");
    r.resampled = doc.at("resampled").get<bool>();
    r.source_grid_size = doc.at("source_grid_size").get<std::size_t>();
    r.grid = doc.at("grid").get<std::vector<double>>();
    r.curves = doc.at("curves").get<std::size_t>();
    r.eigenvalues = doc.at("eigenvalues").get<std::vector<double>>();
    r.normalized = doc.at("normalized_eigenvalues").get<std::vector<double>>();
    r.selected_d = doc.at("selected_d").get<int>();
    r.capped = doc.at("capped").get<bool>();
    for (const auto& p : doc.at("pvalues")) {
      PValueResult entry;
      entry.d0 = p.at("d0").get<int>();
      entry.p_value = p.at("p_value").get<double>();
      entry.statistic = p.at("statistic").get<double>();
      entry.exceedances = p.at("exceedances").get<std::size_t>();
      entry.degenerate = p.at("degenerate").get<bool>();
      r.pvalues.push_back(entry);
    }
    r.eigenfunctions = doc.at("eigenfunctions").get<std::vector<std::vector<double>>>();
    r.scores = doc.at("scores").get<std::vector<std::vector<double>>>();
    if (doc.contains("timestamp")) r.timestamp = doc.at("timestamp").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("malformed report: ") + e.what());
  }
}

std::string dump_report(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

EstimateReport parse_estimate_report(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidConfig, std::string("report is not valid JSON: ") + e.what());
  }
  return estimate_report_from_json(doc);
}

std::vector<double> normalized_percent(const std::vector<double>& values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  const double norm = std::sqrt(sq);
  std::vector<double> out(values.size(), 0.0);
  if (norm == 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = 100.0 * values[i] / norm;
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace curvedim
