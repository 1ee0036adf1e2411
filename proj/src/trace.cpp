#include "cbandit/trace.hpp"

#include "cbandit/error.hpp"
#include "cbandit/numfmt.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <type_traits>

namespace cbandit {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ';';
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(v[k]);
        else
            out += std::to_string(v[k]);
    }
    return out;
}

}  // namespace

std::string serialize_trace(const PolicyTrace& trace, const ArmSet& arms, std::uint64_t config_hash) {
    std::ostringstream out;
    out << "# config_hash=" << hex64(config_hash) << " seed=" << trace.seed << " policy=" << to_string(trace.policy)
        << " budget=" << format_double(trace.budget) << '\n';
    out << "t,arm,cost,reward,budget_remaining\n";
    for (const auto& r : trace.rounds)
        out << r.t << ',' << arms.label(r.arm) << ',' << format_double(r.cost) << ',' << r.reward << ','
            << format_double(r.budget_remaining) << '\n';
    if (trace.chosen) out << "# chosen=" << arms.label(*trace.chosen) << '\n';
    for (const auto& s : trace.snapshots)
        out << "# snapshot t=" << s.t << " mu_hat=" << join(s.mu_hat) << " ucb=" << join(s.ucb) << " n=" << join(s.n)
            << " s=" << join(s.s) << '\n';
    for (const auto& w : trace.warnings) out << "# warning " << w << '\n';
    return out.str();
}

ParsedTrace parse_trace(std::string_view text, const ArmSet& arms) {
    ParsedTrace out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool saw_columns = false;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream in{std::string(line.substr(1))};
            std::string field;
            while (in >> field) {
                auto eq = field.find('=');
                if (eq == std::string::npos) break;
                std::string key = field.substr(0, eq);
                std::string val = field.substr(eq + 1);
                if (key == "config_hash") {
                    out.config_hash = std::stoull(val, nullptr, 16);
                } else if (key == "seed") {
                    out.seed = std::stoull(val);
                } else if (key == "policy") {
                    out.policy = val;
                } else if (key == "budget") {
                    auto b = parse_double(val);
                    if (!b) throw ParseError(line_no, 1, "bad budget");
                    out.budget = *b;
                } else if (key == "chosen") {
                    out.chosen = arms.parse_label(val);
                }
            }
            continue;
        }
        if (!saw_columns) {
            if (line != "t,arm,cost,reward,budget_remaining") throw ParseError(line_no, 1, "missing column header");
            saw_columns = true;
            continue;
        }
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 5) throw ParseError(line_no, 1, "expected 5 fields");
        Round r;
        auto t = parse_double(cells[0]);
        auto cost = parse_double(cells[2]);
        auto reward = parse_double(cells[3]);
        auto rem = parse_double(cells[4]);
        if (!t || !cost || !reward || !rem) throw ParseError(line_no, 1, "malformed number");
        r.t = static_cast<std::size_t>(*t);
        r.arm = arms.parse_label(std::string(cells[1]));
        r.cost = *cost;
        r.reward = static_cast<int>(*reward);
        r.budget_remaining = *rem;
        out.rounds.push_back(r);
    }
    return out;
}

}  // namespace cbandit
