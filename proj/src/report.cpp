#include "l3fuse/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "l3fuse/errors.hpp"

namespace l3f {

namespace {

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string scientific(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return buf;
}

// One report row as formatted strings; CSV and JSON share these.
struct Row {
  std::string label, engine, tile, r, workers, median_ms, min_ms, flops, tasks,
      verify, max_rel_err;
};

Row make_row(const BenchResult& r) {
  return {r.label,
          std::string(to_string(r.engine)),
          std::to_string(r.tile),
          std::to_string(r.tiles_per_task),
          std::to_string(r.workers),
          fixed(r.median_ms, 4),
          fixed(r.min_ms, 4),
          std::to_string(r.stats.flops),
          std::to_string(r.stats.tasks),
          std::string(to_string(r.verify)),
          scientific(r.max_rel_err)};
}

std::string render_csv(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& result : results) {
    const Row row = make_row(result);
    os << row.label << ',' << row.engine << ',' << row.tile << ',' << row.r << ','
       << row.workers << ',' << row.median_ms << ',' << row.min_ms << ',' << row.flops
       << ',' << row.tasks << ',' << row.verify << ',' << row.max_rel_err << "\n";
  }
  return os.str();
}

std::string render_json(const std::vector<BenchResult>& results) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& result : results) {
    const Row row = make_row(result);
    const LayerSpec& s = result.spec;
    nlohmann::json item{
        {"label", row.label},
        {"engine", row.engine},
        {"T", std::stoi(row.tile)},
        {"R", std::stoull(row.r)},
        {"workers", std::stoull(row.workers)},
        {"median_ms", std::stod(row.median_ms)},
        {"min_ms", std::stod(row.min_ms)},
        {"flops", std::stoull(row.flops)},
        {"tasks", std::stoull(row.tasks)},
        {"verify", row.verify},
        {"max_rel_err", std::stod(row.max_rel_err)},
        {"layer",
         {{"B", s.batch}, {"C", s.in_channels}, {"C_out", s.out_channels},
          {"D", s.in_height}, {"W", s.in_width}, {"K", s.kernel},
          {"pad_lo", s.pad_lo}, {"pad_hi", s.pad_hi}}},
        {"executions", result.executions},
        {"tiles", result.stats.tiles},
        {"intermediate_bytes", result.stats.intermediate_bytes},
        {"phase_seconds", result.stats.phase_seconds},
        {"warnings", result.stats.warnings}};
    if (!result.error.empty()) item["error"] = result.error;
    doc.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

std::string render_table(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "label" << std::setw(13) << "engine"
     << std::right << std::setw(3) << "T" << std::setw(5) << "R" << std::setw(8)
     << "workers" << std::setw(12) << "median_ms" << std::setw(12) << "min_ms"
     << std::setw(10) << "GFLOP/s" << std::setw(8) << "tasks" << std::setw(9)
     << "verify" << std::setw(12) << "max_rel_err" << std::setw(9) << "speedup"
     << "\n";
  std::vector<std::string> notes;
  for (const auto& r : results) {
    const Row row = make_row(r);
    const double gflops =
        r.median_ms > 0.0 ? static_cast<double>(r.stats.flops) / (r.median_ms * 1e6) : 0.0;
    std::string speedup = "-";
    if (r.engine == EngineKind::fused)
      if (auto s = fused_speedup(results, r.label)) speedup = fixed(*s, 2) + "x";
    os << std::left << std::setw(12) << row.label << std::setw(13) << row.engine
       << std::right << std::setw(3) << row.tile << std::setw(5) << row.r << std::setw(8)
       << row.workers << std::setw(12) << row.median_ms << std::setw(12) << row.min_ms
       << std::setw(10) << fixed(gflops, 1) << std::setw(8) << row.tasks << std::setw(9)
       << row.verify << std::setw(12) << row.max_rel_err << std::setw(9) << speedup
       << "\n";
    if (!r.error.empty()) notes.push_back(r.label + " / " + row.engine + ": " + r.error);
    for (const auto& w : r.stats.warnings)
      notes.push_back(r.label + " / " + row.engine + ": " + w);
  }
  for (const auto& note : notes) os << "note: " << note << "\n";
  return os.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::table;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw InvalidParameter("unknown report format '" + std::string(name) + "'");
}

std::optional<double> fused_speedup(const std::vector<BenchResult>& results,
                                    std::string_view label) {
  double fused = 0.0;
  double best_other = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (r.label != label || !r.error.empty()) continue;
    if (r.engine == EngineKind::fused)
      fused = r.median_ms;
    else
      best_other = std::min(best_other, r.median_ms);
  }
  if (fused <= 0.0 || best_other == std::numeric_limits<double>::infinity())
    return std::nullopt;
  return best_other / fused;
}

std::string render_report(const std::vector<BenchResult>& results, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return render_csv(results);
    case ReportFormat::json: return render_json(results);
    case ReportFormat::table: return render_table(results);
  }
  return {};
}

void emit_report(const std::vector<BenchResult>& results, ReportFormat format,
                 const std::optional<std::string>& path) {
  if (results.empty()) throw Error("no results to report");
  const std::string text = render_report(results, format);
  if (!path || path->empty() || *path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw Error("cannot write report to " + *path);
  out << text;
  if (!out) throw Error("failed writing report to " + *path);
}

}  // namespace l3f
