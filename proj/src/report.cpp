#include "cbandit/report.hpp"

#include "cbandit/error.hpp"
#include "cbandit/numfmt.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbandit {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_csv(const RegretReport& report) {
    std::string out(kReportCsvHeader);
    out += '\n';
    for (const RegretCell& c : report.cells) {
        out += c.policy;
        out += ',';
        out += to_string(c.axis);
        out += ',';
        out += format_double(c.sweep_value);
        out += ',';
        out += std::to_string(c.trials);
        out += ',';
        out += format_double(c.mean_regret);
        out += ',';
        out += format_double(c.std_error);
        out += ',';
        out += to_string(c.kind);
        out += '\n';
    }
    return out;
}

std::string report_json(const RegretReport& report) {
    json doc;
    json config = report.config_echo.empty() ? json(nullptr) : json::parse(report.config_echo);
    doc["config"] = config;
    json oracle;
    oracle["arms"] = report.arm_labels;
    oracle["means"] = report.means;
    json points = json::array();
    for (const OraclePoint& p : report.oracle) {
        json jp;
        jp["sweep_value"] = p.sweep_value;
        jp["budget"] = p.budget;
        jp["costs"] = p.costs;
        jp["best_arm"] = p.best_arm < report.arm_labels.size() ? report.arm_labels[p.best_arm] : "";
        jp["best_ratio_arm"] = p.best_ratio_arm < report.arm_labels.size() ? report.arm_labels[p.best_ratio_arm] : "";
        jp["delta"] = p.gaps;
        jp["optimal_value"] = optional_number(p.optimal_value);
        points.push_back(std::move(jp));
    }
    oracle["points"] = points;
    doc["oracle"] = oracle;
    json cells = json::array();
    for (const RegretCell& c : report.cells)
        cells.push_back({{"policy", c.policy},
                         {"sweep_axis", to_string(c.axis)},
                         {"sweep_value", c.sweep_value},
                         {"trials", c.trials},
                         {"mean_regret", c.mean_regret},
                         {"stderr", c.std_error},
                         {"regret_kind", to_string(c.kind)}});
    doc["cells"] = cells;
    doc["warnings"] = report.warnings;
    doc["version"] = report.version;
    doc["wall_seconds"] = report.wall_seconds;
    return doc.dump(2) + "\n";
}

void write_report(const RegretReport& report, const std::filesystem::path& csv_path) {
    write_file(csv_path, report_csv(report));
    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    write_file(sidecar, report_json(report));
}

std::vector<RegretCell> parse_report_csv(std::string_view text) {
    std::vector<RegretCell> cells;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!header_seen) {
            if (line != kReportCsvHeader) throw ParseError(line_no, 1, "unexpected CSV header");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 7) throw ParseError(line_no, 1, "expected 7 fields");
        std::size_t col = 1;
        auto field_col = [&](std::size_t k) {
            col = 1;
            for (std::size_t i = 0; i < k; ++i) col += fields[i].size() + 1;
            return col;
        };
        RegretCell c;
        c.policy = std::string(fields[0]);
        if (fields[1] == "budget")
            c.axis = SweepAxis::Budget;
        else if (fields[1] == "cost")
            c.axis = SweepAxis::Cost;
        else
            throw ParseError(line_no, field_col(1), "unknown sweep_axis");
        auto number = [&](std::size_t k) {
            auto v = parse_double(fields[k]);
            if (!v) throw ParseError(line_no, field_col(k), "malformed number");
            return *v;
        };
        c.sweep_value = number(2);
        {
            std::size_t n = 0;
            auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), n);
            if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size())
                throw ParseError(line_no, field_col(3), "malformed trial count");
            c.trials = n;
        }
        c.mean_regret = number(4);
        c.std_error = number(5);
        auto kind = parse_regret_kind(fields[6]);
        if (!kind) throw ParseError(line_no, field_col(6), "unknown regret_kind");
        c.kind = *kind;
        cells.push_back(std::move(c));
    }
    if (!header_seen) throw ParseError(1, 1, "missing CSV header");
    return cells;
}

std::string format_summary(const RegretReport& report) {
    std::size_t width = 6;
    for (const RegretCell& c : report.cells) width = std::max(width, c.policy.size());
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %-6s  %10s  %6s  %12s  %10s  %s\n", static_cast<int>(width), "policy", "axis",
                  "value", "trials", "mean_regret", "stderr", "kind");
    out << buf;
    for (const RegretCell& c : report.cells) {
        std::snprintf(buf, sizeof buf, "%-*s  %-6s  %10g  %6zu  %12.6f  %10.6f  %s\n", static_cast<int>(width),
                      c.policy.c_str(), std::string(to_string(c.axis)).c_str(), c.sweep_value, c.trials, c.mean_regret,
                      c.std_error, std::string(to_string(c.kind)).c_str());
        out << buf;
    }
    return out.str();
}

}  // namespace cbandit
