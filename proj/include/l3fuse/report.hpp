#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l3fuse/bench.hpp"

namespace l3f {

enum class ReportFormat { table, csv, json };
ReportFormat parse_report_format(std::string_view name);

// CSV header, fixed for interchange.
inline constexpr std::string_view kCsvHeader =
    "label,engine,T,R,workers,median_ms,min_ms,flops,tasks,verify,max_rel_err";

std::string render_report(const std::vector<BenchResult>& results, ReportFormat format);

// Writes to `path`, or standard output when empty. Throws Error when the
// path cannot be written or `results` is empty.
void emit_report(const std::vector<BenchResult>& results, ReportFormat format,
                 const std::optional<std::string>& path);

// Fused median relative to the fastest other engine on the same layer
// (>1 means fused is faster); empty when there is nothing to compare.
std::optional<double> fused_speedup(const std::vector<BenchResult>& results,
                                    std::string_view label);

}  // namespace l3f
