#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "l3fuse/errors.hpp"
#include "l3fuse/report.hpp"

using namespace l3f;

namespace {

BenchResult row(std::string label, EngineKind engine, double median) {
  BenchResult r;
  r.label = std::move(label);
  r.engine = engine;
  r.spec.batch = 2;
  r.spec.in_channels = r.spec.out_channels = 8;
  r.spec.in_height = r.spec.in_width = 16;
  r.tile = engine == EngineKind::direct ? 0 : 7;
  r.tiles_per_task = engine == EngineKind::fused ? 24 : 0;
  r.workers = 4;
  r.executions = 13;
  r.median_ms = median;
  r.min_ms = median * 0.9;
  r.stats.flops = 123456;
  r.stats.tasks = 3;
  r.verify = VerifyStatus::pass;
  r.max_rel_err = 2.5e-7;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("format names") {
  CHECK(parse_report_format("csv") == ReportFormat::csv);
  CHECK(parse_report_format("json") == ReportFormat::json);
  CHECK(parse_report_format("table") == ReportFormat::table);
  CHECK_THROWS_AS(parse_report_format("xml"), InvalidParameter);
}

TEST_CASE("csv has one line per result under a fixed header") {
  const std::vector<BenchResult> results{row("a", EngineKind::three_stage, 10.0),
                                         row("a", EngineKind::fused, 5.0)};
  const auto l = lines(render_report(results, ReportFormat::csv));
  REQUIRE(l.size() == 3);
  CHECK(l[0] == kCsvHeader);
  const auto f = split(l[2]);
  REQUIRE(f.size() == 11);
  CHECK(f[0] == "a");
  CHECK(f[1] == "fused");
  CHECK(f[2] == "7");
  CHECK(f[3] == "24");
  CHECK(f[4] == "4");
  CHECK(std::stod(f[5]) == 5.0);
  CHECK(f[7] == "123456");
  CHECK(f[9] == "pass");
}

TEST_CASE("json carries the same values as csv") {
  const std::vector<BenchResult> results{row("x", EngineKind::direct, 1.25),
                                         row("x", EngineKind::fused, 0.5)};
  const auto csv = lines(render_report(results, ReportFormat::csv));
  const auto doc = nlohmann::json::parse(render_report(results, ReportFormat::json));
  REQUIRE(doc.size() == 2);
  const auto header = split(std::string(kCsvHeader));
  for (std::size_t i = 0; i < 2; ++i) {
    const auto f = split(csv[i + 1]);
    const auto& item = doc[i];
    CHECK(item["label"] == f[0]);
    CHECK(item["engine"] == f[1]);
    CHECK(item["T"].get<int>() == std::stoi(f[2]));
    CHECK(item["R"].get<std::size_t>() == std::stoull(f[3]));
    CHECK(item["median_ms"].get<double>() == std::stod(f[5]));
    CHECK(item["min_ms"].get<double>() == std::stod(f[6]));
    CHECK(item["flops"].get<std::uint64_t>() == std::stoull(f[7]));
    CHECK(item["verify"] == f[9]);
    CHECK(item["max_rel_err"].get<double>() == std::stod(f[10]));
    CHECK(item["layer"]["C"] == 8);
    CHECK(item["executions"] == 13);
  }
}

TEST_CASE("fused speedup") {
  const std::vector<BenchResult> results{row("a", EngineKind::direct, 40.0),
                                         row("a", EngineKind::three_stage, 10.0),
                                         row("a", EngineKind::fused, 5.0),
                                         row("b", EngineKind::fused, 5.0)};
  REQUIRE(fused_speedup(results, "a"));
  CHECK(*fused_speedup(results, "a") == doctest::Approx(2.0));
  CHECK_FALSE(fused_speedup(results, "b"));
  CHECK_FALSE(fused_speedup(results, "missing"));
  const std::string table = render_report(results, ReportFormat::table);
  CHECK(table.find("2.00x") != std::string::npos);
}

TEST_CASE("errors appear in every format") {
  BenchResult bad = row("v", EngineKind::three_stage, 0.0);
  bad.error = "needs 3 GB";
  bad.verify = VerifyStatus::error;
  const std::vector<BenchResult> results{bad};
  CHECK(render_report(results, ReportFormat::table).find("needs 3 GB") != std::string::npos);
  CHECK(render_report(results, ReportFormat::csv).find(",error,") != std::string::npos);
  CHECK(nlohmann::json::parse(render_report(results, ReportFormat::json))[0]["error"] ==
        "needs 3 GB");
}

TEST_CASE("emit_report writes files and rejects bad input") {
  const std::vector<BenchResult> results{row("a", EngineKind::fused, 1.0)};
  const auto path = std::filesystem::temp_directory_path() / "l3fuse_report_test.csv";
  emit_report(results, ReportFormat::csv, path.string());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == kCsvHeader);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit_report({}, ReportFormat::csv, std::nullopt), Error);
  CHECK_THROWS_AS(emit_report(results, ReportFormat::csv, "/nonexistent/dir/out.csv"), Error);
}
