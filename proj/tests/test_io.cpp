#include "curvedim/cli.hpp"
#include "curvedim/error.hpp"
#include "curvedim/io.hpp"
#include "curvedim/report.hpp"
#include "curvedim/simulation.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace curvedim;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("curvedim_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string csv_of(const std::vector<double>& grid, const std::vector<std::vector<double>>& rows) {
  std::ostringstream s;
  s.precision(17);
  auto line = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    s << '\n';
  };
  line(grid);
  for (const auto& r : rows) line(r);
  return s.str();
}

int cli(const std::vector<std::string>& args, std::string* diag = nullptr) {
  std::ostringstream err;
  const int code = run_cli(args, err);
  if (diag) *diag = err.str();
  return code;
}

}  // namespace

TEST(Csv, DyadicGridIsKeptAsGiven) {
  std::vector<double> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(0.25 * i);
  std::istringstream in(csv_of(grid, {{1, 2, 3, 4, 5, 6, 7, 8}, {0, 0, 0, 0, 0, 0, 0, 1.5}}));
  const IngestedPanel p = read_curves_csv(in);
  EXPECT_FALSE(p.resampled);
  EXPECT_EQ(p.source_grid_size, 8u);
  EXPECT_EQ(p.panel.grid, grid);
  EXPECT_DOUBLE_EQ(p.panel.a, 0.0);
  EXPECT_DOUBLE_EQ(p.panel.b, 2.0);
  ASSERT_EQ(p.panel.values.rows(), 2);
  EXPECT_EQ(p.panel.values(1, 7), 1.5);
}

TEST(Csv, NonDyadicGridIsResampledLinearly) {
  std::vector<double> grid;
  std::vector<double> curve;
  for (int i = 0; i < 80; ++i) {
    grid.push_back(i / 79.0);
    curve.push_back(std::sin(3.0 * grid.back()) + 0.1 * (i % 3));
  }
  std::istringstream in(csv_of(grid, {curve}));
  const IngestedPanel p = read_curves_csv(in);
  EXPECT_TRUE(p.resampled);
  EXPECT_EQ(p.source_grid_size, 80u);
  ASSERT_EQ(p.panel.grid_size(), 128u);
  EXPECT_DOUBLE_EQ(p.panel.grid.front(), 0.0);
  EXPECT_NEAR(p.panel.grid.back(), 1.0, 1e-12);
  for (std::size_t i = 0; i < 128; ++i) {
    EXPECT_NEAR(p.panel.values(0, static_cast<Eigen::Index>(i)), oracle::interpolate(grid, curve, p.panel.grid[i]),
                1e-12);
  }
}

TEST(Csv, IngestWriteIngestIsIdempotent) {
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(2.0 + 0.1 * i);
  std::vector<std::vector<double>> rows(3, std::vector<double>(50));
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < 50; ++i) rows[t][i] = std::cos(0.3 * i * (t + 1)) / 3.0;
  }
  std::istringstream in(csv_of(grid, rows));
  const IngestedPanel first = read_curves_csv(in);
  std::ostringstream out;
  write_curves_csv(out, first.panel);
  std::istringstream again(out.str());
  const IngestedPanel second = read_curves_csv(again);
  EXPECT_FALSE(second.resampled);
  EXPECT_EQ(second.panel.grid, first.panel.grid);
  EXPECT_EQ(second.panel.values, first.panel.values);
  std::ostringstream out2;
  write_curves_csv(out2, second.panel);
  EXPECT_EQ(out2.str(), out.str());
}

TEST(Csv, BlankLinesAreIgnored) {
  std::istringstream in("0,0.5\n\n1,2\n\n3,4\n");
  const IngestedPanel p = read_curves_csv(in);
  EXPECT_EQ(p.panel.values.rows(), 2);
}

TEST(Csv, ErrorCodes) {
  auto code_of = [](const std::string& text, int min_curves = 1) {
    std::istringstream in(text);
    try {
      (void)read_curves_csv(in, min_curves);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error for: " << text;
    return Errc::Io;
  };
  EXPECT_EQ(code_of("0,0.5\n1,2,3\n"), Errc::MalformedCsv);
  EXPECT_EQ(code_of("0,0.5,1\n1,2\n"), Errc::MalformedCsv);
  EXPECT_EQ(code_of("0,0.5\n1,abc\n"), Errc::MalformedCsv);
  EXPECT_EQ(code_of("0,0.1,0.3,0.4\n1,2,3,4\n"), Errc::NonUniformGrid);
  EXPECT_EQ(code_of("0,0.5\n"), Errc::TooFewCurves);
  EXPECT_EQ(code_of("0,0.5\n1,2\n", 3), Errc::TooFewCurves);
  EXPECT_EQ(code_of(""), Errc::MalformedCsv);
}

TEST(Csv, MissingFile) {
  try {
    (void)ingest_curves("/nonexistent/dir/curves.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Io);
  }
}

TEST(Output, ReplacesTargetFile) {
  TempDir dir;
  const std::string path = dir.file("out.json");
  spit(path, "old contents that are longer");
  write_output(path, "new\n");
  EXPECT_EQ(slurp(path), "new\n");
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  EXPECT_THROW(write_output(dir.file("missing/out.json"), "x"), Error);
}

TEST(Report, JsonRoundTrip) {
  EstimateReport r;
  r.version = "9.9.9";
  r.seed = 18446744073709551615ull;
  r.config = {{"method", "ordinary"}, {"B", 100}};
  r.resampled = true;
  r.source_grid_size = 100;
  r.grid = {0.0, 0.1, 1.0 / 3.0};
  r.curves = 3;
  r.eigenvalues = {3.0000000000000004, 1e-300, 0.1};
  r.normalized = normalized_percent(r.eigenvalues);
  r.selected_d = 1;
  r.capped = false;
  r.pvalues = {{1, 0.0099009900990099, 2.5, 0, false}, {2, 1.0, 0.0, 100, true}};
  r.eigenfunctions = {{0.1, -0.2, 5e-17}};
  r.scores = {{1.0}, {-2.0}, {std::nextafter(1.0, 2.0)}};
  r.timestamp = "2024-01-01T00:00:00Z";
  const std::string text = dump_report(to_json(r));
  EXPECT_EQ(text.back(), '\n');
  const EstimateReport back = parse_estimate_report(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(dump_report(to_json(back)), text);

  r.timestamp.reset();
  EXPECT_EQ(parse_estimate_report(dump_report(to_json(r))), r);
  EXPECT_EQ(to_json(r).at("schema"), std::string(kReportSchema));
}

TEST(Report, NormalizedPercent) {
  const auto v = normalized_percent({3.0, 4.0});
  EXPECT_DOUBLE_EQ(v[0], 60.0);
  EXPECT_DOUBLE_EQ(v[1], 80.0);
  EXPECT_EQ(normalized_percent({0.0, 0.0}), (std::vector<double>{0.0, 0.0}));
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  std::string diag;
  EXPECT_EQ(cli({}, &diag), 2);
  EXPECT_EQ(cli({"frobnicate"}, &diag), 2);
  EXPECT_EQ(cli({"estimate"}, &diag), 2);
  EXPECT_EQ(cli({"estimate", "--input", dir.file("none.csv")}, &diag), 2);
  EXPECT_NE(diag.find("Io"), std::string::npos);

  const std::string sim = dir.file("sim.csv");
  ASSERT_EQ(cli({"simulate", "--n", "30", "--grid", "64", "--seed", "3", "--out", sim}), 0);
  EXPECT_EQ(cli({"estimate", "--input", sim, "--method", "bogus"}, &diag), 2);
  EXPECT_NE(diag.find("InvalidMethod"), std::string::npos);
  EXPECT_EQ(cli({"estimate", "--input", sim, "--threshold", "-1"}, &diag), 2);
  EXPECT_EQ(cli({"estimate", "--input", sim, "--p", "40"}, &diag), 2);
  EXPECT_EQ(cli({"estimate", "--input", sim, "--jmax", "9"}, &diag), 2);
  EXPECT_EQ(cli({"aggregate", "--input", sim, "--delta", "3", "--weights", "1,1"}, &diag), 2);
  EXPECT_EQ(cli({"simulate", "--format", "json"}, &diag), 2);
  EXPECT_EQ(cli({"experiment", "table9"}, &diag), 2);

  const std::string zero = dir.file("zero.csv");
  spit(zero, "0,0.25,0.5,0.75\n0,0,0,0\n");
  EXPECT_EQ(cli({"density", "--input", zero, "--input-kind", "sqrt", "--j0", "0", "--jmax", "1"}, &diag), 3);
  EXPECT_NE(diag.find("ZeroCurve"), std::string::npos);
  const std::string negative = dir.file("negative.csv");
  spit(negative, "0,0.25,0.5,0.75\n1,-1,1,1\n");
  EXPECT_EQ(cli({"density", "--input", negative, "--j0", "0", "--jmax", "1"}, &diag), 2);
  EXPECT_NE(diag.find("NegativeDensity"), std::string::npos);
}

TEST(Cli, SeedFromEnvironment) {
  TempDir dir;
  ::setenv("CURVEDIM_SEED", "11", 1);
  ASSERT_EQ(cli({"simulate", "--n", "8", "--grid", "16", "--p", "1", "--out", dir.file("a.csv")}), 0);
  ::unsetenv("CURVEDIM_SEED");
  ASSERT_EQ(cli({"simulate", "--n", "8", "--grid", "16", "--p", "1", "--seed", "11", "--out", dir.file("b.csv")}), 0);
  ASSERT_EQ(cli({"simulate", "--n", "8", "--grid", "16", "--p", "1", "--out", dir.file("c.csv")}), 0);
  EXPECT_EQ(slurp(dir.file("a.csv")), slurp(dir.file("b.csv")));
  EXPECT_NE(slurp(dir.file("a.csv")), slurp(dir.file("c.csv")));
}

TEST(Cli, EstimateReportIsIndependentOfThreads) {
  TempDir dir;
  const std::string sim = dir.file("sim.csv");
  ASSERT_EQ(cli({"simulate", "--n", "40", "--grid", "64", "--seed", "5", "--out", sim}), 0);
  std::vector<std::string> reports;
  for (const char* threads : {"1", "3"}) {
    const std::string out = dir.file(std::string("est") + threads + ".json");
    ASSERT_EQ(cli({"estimate", "--input", sim, "--j0", "3", "--jmax", "4", "--B", "19", "--d-max", "3", "--seed",
                   "42", "--no-timestamp", "--threads", threads, "--out", out}),
              0);
    reports.push_back(slurp(out));
  }
  EXPECT_EQ(reports[0], reports[1]);
  const EstimateReport r = parse_estimate_report(reports[0]);
  EXPECT_FALSE(r.timestamp.has_value());
  EXPECT_EQ(r.curves, 40u);
  EXPECT_EQ(r.grid.size(), 64u);
  EXPECT_EQ(r.eigenvalues.size(), 32u);
  EXPECT_EQ(r.scores.size(), static_cast<std::size_t>(r.selected_d > 0 ? 40 : 0));
  EXPECT_EQ(r.eigenfunctions.size(), static_cast<std::size_t>(r.selected_d));
  EXPECT_EQ(r.config.at("B"), 19);
  EXPECT_EQ(r.config.at("seed"), 42);
  EXPECT_FALSE(r.config.contains("threads"));
  EXPECT_FALSE(r.config.contains("output"));
}

TEST(Cli, ConfigEchoResolvesDefaults) {
  RunConfig cfg;
  cfg.command = "experiment";
  cfg.experiment = "table2";
  cfg.threads = 7;
  cfg.output = "somewhere.csv";
  const nlohmann::json echo = config_echo(cfg);
  EXPECT_EQ(echo.at("dims"), (std::vector<int>{2, 4, 6}));
  EXPECT_EQ(echo.at("sizes"), (std::vector<int>{100, 300, 600}));
  EXPECT_EQ(echo.at("replicates"), 100);
  EXPECT_EQ(echo.at("delta"), 3);
  EXPECT_EQ(echo.at("format"), "csv");
  EXPECT_EQ(echo.at("wavelet"), "daub4");
  EXPECT_FALSE(echo.contains("threads"));
  EXPECT_FALSE(echo.contains("output"));

  cfg.experiment = "table1";
  const nlohmann::json t1 = config_echo(cfg);
  EXPECT_EQ(t1.at("methods"), (std::vector<std::string>{"ordinary"}));
  EXPECT_EQ(t1.at("replicates"), 50);
  EXPECT_EQ(t1.at("B"), 100);
}

TEST(Cli, Table2CsvTrueRows) {
  TempDir dir;
  const std::string out = dir.file("t2.csv");
  ASSERT_EQ(cli({"experiment", "table2", "--dims", "2", "--sizes", "30", "--replicates", "1", "--j0", "3", "--jmax",
                 "4", "--out", out}),
            0);
  const std::string text = slurp(out);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("method,d,n,theta_1,", 0), 0u);
  const TrueEigenvalues t = true_alpha(1.5, ar_coefficients(2), {3, {0.5, 0.3, 0.1}, 5});
  int true_rows = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.find(",true,") == std::string::npos) continue;
    ++true_rows;
    std::istringstream fields(line);
    std::string method, d, n, v1, v2;
    std::getline(fields, method, ',');
    std::getline(fields, d, ',');
    std::getline(fields, n, ',');
    std::getline(fields, v1, ',');
    std::getline(fields, v2, ',');
    const Eigen::VectorXd& expected = method == "aggregate" ? t.aggregate : t.non_aggregate;
    EXPECT_EQ(std::stod(v1), expected(0));
    EXPECT_EQ(std::stod(v2), expected(1));
  }
  EXPECT_EQ(true_rows, 2);
}

TEST(Cli, DensityCsvOutput) {
  TempDir dir;
  const std::string in = dir.file("dens.csv");
  std::vector<double> grid;
  std::vector<double> dens;
  for (int i = 0; i < 64; ++i) {
    grid.push_back(i / 64.0);
    dens.push_back(1.0 + 0.5 * std::cos(2.0 * M_PI * grid.back()));
  }
  spit(in, csv_of(grid, {dens}));
  const std::string out = dir.file("out.json");
  ASSERT_EQ(cli({"density", "--input", in, "--j0", "2", "--jmax", "4", "--no-timestamp", "--out", out}), 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_NEAR(doc.at("integrals")[0].get<double>(), 1.0, 1e-10);
  EXPECT_GE(doc.at("minima")[0].get<double>(), 0.0);
  EXPECT_FALSE(doc.contains("timestamp"));
}
