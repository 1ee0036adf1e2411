#pragma once

#include "cbandit/harness.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cbandit {

inline constexpr std::string_view kReportCsvHeader = "policy,sweep_axis,sweep_value,trials,mean_regret,stderr,regret_kind";

/// Header line plus one line per cell. Depends only on the cells, so it is
/// byte-stable for identical inputs.
std::string report_csv(const RegretReport& report);

/// Config echo, oracle block, warnings, version and wall-clock time.
std::string report_json(const RegretReport& report);

/// Writes `csv_path` and a sidecar with the extension replaced by `.json`.
/// Throws Error(IoError).
void write_report(const RegretReport& report, const std::filesystem::path& csv_path);

/// Inverse of report_csv. Throws ParseError.
std::vector<RegretCell> parse_report_csv(std::string_view text);

/// Fixed-width summary table for terminals.
std::string format_summary(const RegretReport& report);

}  // namespace cbandit
