#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "edap/sim/pipeline.hpp"

namespace edap::sim {

/// Free-form `run.*` keys carried alongside a report (trace, seed, ...).
using ReportMeta = std::map<std::string, std::string>;

/// `key = value` lines: results, stall and counter breakdowns, then the
/// echoed configuration, then any meta keys under `run.`.
std::string format_report(const SimReport& r, const ReportMeta& meta = {});

struct ParsedReport {
  SimReport report;
  ReportMeta meta;
};

/// ParseError with a line number for malformed lines, unknown keys, or a
/// missing required key.
ParsedReport parse_report(std::string_view text);

/// Normalized-IPC table: one row per report, relative to the baseline row
/// (or the first row when there is none). Ratios are recomputed from the
/// integer cycle and instruction counts.
std::string format_comparison(const std::vector<SimReport>& reports);

}  // namespace edap::sim
