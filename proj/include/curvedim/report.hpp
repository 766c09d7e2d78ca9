#pragma once

#include "curvedim/bootstrap.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curvedim {

inline constexpr std::string_view kReportSchema = "curvedim-report/1";

/// Output of `estimate`. Keys are written in sorted order and numbers in
/// shortest round-trip form, so parse(serialize(r)) == r.
struct EstimateReport {
  std::string version;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  bool resampled = false;
  std::size_t source_grid_size = 0;
  std::vector<double> grid;
  std::size_t curves = 0;
  std::vector<double> eigenvalues;  // descending
  std::vector<double> normalized;   // 100 * lambda / ||lambda||
  int selected_d = 0;
  bool capped = false;
  std::vector<PValueResult> pvalues;
  std::vector<std::vector<double>> eigenfunctions;  // selected_d rows sampled on `grid`
  std::vector<std::vector<double>> scores;          // n rows of selected_d scores
  std::optional<std::string> timestamp;

  friend bool operator==(const EstimateReport&, const EstimateReport&) = default;
};

[[nodiscard]] nlohmann::json to_json(const EstimateReport& report);
[[nodiscard]] EstimateReport estimate_report_from_json(const nlohmann::json& doc);

/// Pretty-printed document with a trailing newline.
[[nodiscard]] std::string dump_report(const nlohmann::json& doc);
[[nodiscard]] EstimateReport parse_estimate_report(std::string_view text);

/// 100 * v / ||v||_2 (zeros if v is zero).
[[nodiscard]] std::vector<double> normalized_percent(const std::vector<double>& values);

[[nodiscard]] std::string utc_timestamp();

}  // namespace curvedim
