#include "cbandit/graph_io.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace cbandit {

namespace {

struct Token {
    std::string text;
    std::size_t line;
    std::size_t column;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits `rest` (starting at 1-based column `col0`) on commas, and also on
// whitespace when `split_space` is set. Tokens are trimmed.
std::vector<Token> split_items(std::string_view rest, std::size_t line, std::size_t col0, bool split_space) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < rest.size()) {
        while (i < rest.size() && (is_space(rest[i]) || rest[i] == ',')) ++i;
        if (i >= rest.size()) break;
        std::size_t start = i;
        while (i < rest.size() && rest[i] != ',' && !(split_space && is_space(rest[i]))) ++i;
        std::size_t end = i;
        while (end > start && is_space(rest[end - 1])) --end;
        out.push_back({std::string(rest.substr(start, end - start)), line, col0 + start});
    }
    return out;
}

std::string strip_inner_space(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!is_space(c)) out.push_back(c);
    return out;
}

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                  c == '.' || c == '\'';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

Admg parse_graph(std::string_view text) {
    std::vector<NodeSpec> nodes;
    std::map<std::string, NodeId> ids;
    std::vector<std::pair<Token, Token>> directed;
    std::vector<std::pair<Token, Token>> bidirected;
    std::optional<Token> reward;
    std::optional<std::vector<Token>> intervenable;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        ++line_no;
        pos = nl + 1;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t first = 0;
        while (first < line.size() && is_space(line[first])) ++first;
        if (first == line.size()) continue;

        std::size_t colon = line.find(':', first);
        if (colon == std::string_view::npos) throw ParseError(line_no, first + 1, "expected 'key: value'");
        std::size_t key_end = colon;
        while (key_end > first && is_space(line[key_end - 1])) --key_end;
        std::string key(line.substr(first, key_end - first));
        std::string_view rest = line.substr(colon + 1);
        std::size_t rest_col = colon + 2;

        if (key == "nodes") {
            for (auto& tok : split_items(rest, line_no, rest_col, true)) {
                NodeSpec spec;
                auto c = tok.text.find(':');
                spec.name = tok.text.substr(0, c);
                if (c != std::string::npos) {
                    std::string_view num = std::string_view(tok.text).substr(c + 1);
                    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), spec.domain_size);
                    if (ec != std::errc{} || ptr != num.data() + num.size() || spec.domain_size < 2)
                        throw ParseError(tok.line, tok.column + c + 1, "domain size must be an integer >= 2");
                }
                if (!valid_name(spec.name)) throw ParseError(tok.line, tok.column, "invalid node name '" + spec.name + "'");
                if (ids.count(spec.name)) throw ParseError(tok.line, tok.column, "duplicate node '" + spec.name + "'");
                ids.emplace(spec.name, nodes.size());
                nodes.push_back(std::move(spec));
            }
        } else if (key == "directed" || key == "bidirected") {
            const bool bi = key == "bidirected";
            const std::string arrow = bi ? "<->" : "->";
            for (auto& tok : split_items(rest, line_no, rest_col, false)) {
                std::string item = strip_inner_space(tok.text);
                auto a = item.find(arrow);
                if (a == std::string::npos || (!bi && item.find("<->") != std::string::npos))
                    throw ParseError(tok.line, tok.column, "expected 'A" + arrow + "B', got '" + tok.text + "'");
                std::string lhs = item.substr(0, a);
                std::string rhs = item.substr(a + arrow.size());
                auto rhs_col = tok.column + tok.text.find(arrow) + arrow.size();
                Token l{lhs, tok.line, tok.column};
                Token r{rhs, tok.line, rhs_col};
                (bi ? bidirected : directed).emplace_back(l, r);
            }
        } else if (key == "reward") {
            auto items = split_items(rest, line_no, rest_col, true);
            if (items.size() != 1) throw ParseError(line_no, rest_col, "reward takes exactly one node name");
            if (reward) throw ParseError(line_no, first + 1, "reward given twice");
            reward = items.front();
        } else if (key == "intervenable") {
            if (!intervenable) intervenable.emplace();
            for (auto& tok : split_items(rest, line_no, rest_col, true)) intervenable->push_back(tok);
        } else {
            throw ParseError(line_no, first + 1, "unknown key '" + key + "'");
        }
    }

    auto resolve = [&](const Token& tok) -> NodeId {
        auto it = ids.find(tok.text);
        if (it == ids.end()) throw ParseError(tok.line, tok.column, "unknown node '" + tok.text + "'");
        return it->second;
    };

    std::vector<std::pair<NodeId, NodeId>> dir;
    for (auto& [a, b] : directed) dir.emplace_back(resolve(a), resolve(b));
    std::vector<std::pair<NodeId, NodeId>> bid;
    for (auto& [a, b] : bidirected) bid.emplace_back(resolve(a), resolve(b));
    if (!reward) throw ParseError(line_no, 1, "missing 'reward' entry");
    NodeId y = resolve(*reward);
    std::optional<NodeSet> interv;
    if (intervenable) {
        interv.emplace();
        for (auto& tok : *intervenable) {
            NodeId v = resolve(tok);
            if (v == y) throw ParseError(tok.line, tok.column, "reward node cannot be intervenable");
            interv->push_back(v);
        }
    }
    return Admg(std::move(nodes), std::move(dir), std::move(bid), y, std::move(interv));
}

Admg read_graph_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open graph file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string format_graph(const Admg& g) {
    std::vector<NodeId> order(g.num_nodes());
    for (NodeId v = 0; v < order.size(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return g.name(a) < g.name(b); });
    auto by_name = [&](NodeId a, NodeId b) { return g.name(a) < g.name(b); };

    std::ostringstream out;
    out << "nodes:";
    for (NodeId v : order) {
        out << ' ' << g.name(v);
        if (g.domain_size(v) != 2) out << ':' << g.domain_size(v);
    }
    out << '\n';

    std::vector<std::pair<std::string, std::string>> dir;
    for (auto [a, b] : g.directed_edges()) dir.emplace_back(g.name(a), g.name(b));
    std::sort(dir.begin(), dir.end());
    out << "directed:";
    for (std::size_t k = 0; k < dir.size(); ++k) out << (k ? ", " : " ") << dir[k].first << "->" << dir[k].second;
    out << '\n';

    std::vector<std::pair<std::string, std::string>> bid;
    for (auto [a, b] : g.bidirected_edges()) {
        auto na = g.name(a), nb = g.name(b);
        if (nb < na) std::swap(na, nb);
        bid.emplace_back(na, nb);
    }
    std::sort(bid.begin(), bid.end());
    out << "bidirected:";
    for (std::size_t k = 0; k < bid.size(); ++k) out << (k ? ", " : " ") << bid[k].first << "<->" << bid[k].second;
    out << '\n';

    out << "reward: " << g.name(g.reward()) << '\n';
    NodeSet interv = g.intervenable();
    std::sort(interv.begin(), interv.end(), by_name);
    out << "intervenable:";
    for (NodeId v : interv) out << ' ' << g.name(v);
    out << '\n';
    return out.str();
}

std::string format_node_set(const Admg& g, const NodeSet& set) {
    std::string out = "{";
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (k) out += ", ";
        out += g.name(set[k]);
    }
    return out + "}";
}

}  // namespace cbandit
