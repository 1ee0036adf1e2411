#include "cbandit/model_io.hpp"

#include "cbandit/error.hpp"
#include "cbandit/graph_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cbandit {

using nlohmann::json;

namespace {

NodeId lookup(const Admg& g, const std::string& name) {
    auto id = g.find(name);
    if (!id) throw Error(ErrorKind::ModelInvalid, "unknown node '" + name + "'");
    return *id;
}

}  // namespace

Scm parse_model(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(1, e.byte, e.what());
    }
    try {
        std::optional<Admg> graph;
        if (doc.contains("graph")) {
            graph = parse_graph(doc.at("graph").get<std::string>());
        } else if (doc.contains("graph_file")) {
            std::filesystem::path p = doc.at("graph_file").get<std::string>();
            graph = read_graph_file(p.is_relative() ? base_dir / p : p);
        } else {
            throw Error(ErrorKind::ModelInvalid, "model needs 'graph' or 'graph_file'");
        }
        const Admg& g = *graph;

        std::vector<Latent> latents;
        if (doc.contains("latents")) {
            for (const auto& l : doc.at("latents")) {
                auto ends = l.at("between").get<std::vector<std::string>>();
                if (ends.size() != 2) throw Error(ErrorKind::ModelInvalid, "latent 'between' needs two nodes");
                latents.push_back({lookup(g, ends[0]), lookup(g, ends[1]), l.value("p", 0.5)});
            }
        }

        std::vector<Cpt> cpts(g.num_nodes());
        std::vector<bool> seen(g.num_nodes(), false);
        for (const auto& c : doc.at("cpts")) {
            NodeId v = lookup(g, c.at("node").get<std::string>());
            if (seen[v]) throw Error(ErrorKind::ModelInvalid, "duplicate CPT for '" + g.name(v) + "'");
            seen[v] = true;
            Cpt& cpt = cpts[v];
            for (const auto& p : c.value("parents", std::vector<std::string>{})) cpt.parents.push_back(lookup(g, p));
            cpt.latents = c.value("latents", std::vector<std::size_t>{});
            for (const auto& row : c.at("rows")) {
                auto r = row.get<std::vector<double>>();
                if (r.size() != static_cast<std::size_t>(g.domain_size(v)))
                    throw Error(ErrorKind::ModelInvalid, "CPT row of '" + g.name(v) + "' has the wrong width");
                cpt.table.insert(cpt.table.end(), r.begin(), r.end());
            }
        }
        for (NodeId v = 0; v < g.num_nodes(); ++v)
            if (!seen[v]) throw Error(ErrorKind::ModelInvalid, "missing CPT for '" + g.name(v) + "'");
        return Scm(g, std::move(latents), std::move(cpts));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ModelInvalid, e.what());
    }
}

Scm read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), path.parent_path());
}

std::string format_model(const Scm& scm) {
    const Admg& g = scm.graph();
    json doc;
    doc["graph"] = format_graph(g);
    json latents = json::array();
    for (const auto& l : scm.latents()) latents.push_back({{"between", {g.name(l.a), g.name(l.b)}}, {"p", l.p_one}});
    doc["latents"] = latents;
    json cpts = json::array();
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const Cpt& c = scm.cpt(v);
        json parents = json::array();
        for (NodeId p : c.parents) parents.push_back(g.name(p));
        json rows = json::array();
        const auto d = static_cast<std::size_t>(g.domain_size(v));
        for (std::size_t r = 0; r * d < c.table.size(); ++r)
            rows.push_back(std::vector<double>(c.table.begin() + static_cast<long>(r * d),
                                               c.table.begin() + static_cast<long>((r + 1) * d)));
        cpts.push_back({{"node", g.name(v)}, {"parents", parents}, {"latents", c.latents}, {"rows", rows}});
    }
    doc["cpts"] = cpts;
    return doc.dump(2) + "\n";
}

}  // namespace cbandit
