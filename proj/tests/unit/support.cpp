#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace cbt {

namespace {

std::pair<std::string, std::string> split_edge(const std::string& e, const std::string& arrow) {
    const auto pos = e.find(arrow);
    if (pos == std::string::npos) throw std::invalid_argument("bad edge " + e);
    return {e.substr(0, pos), e.substr(pos + arrow.size())};
}

}  // namespace

Admg make_graph(const std::vector<std::string>& nodes, const std::vector<std::string>& directed,
                const std::vector<std::string>& bidirected, const std::string& reward) {
    std::vector<NodeSpec> specs;
    for (const auto& n : nodes) specs.push_back({n, 2});
    auto index = [&](const std::string& n) {
        auto it = std::find(nodes.begin(), nodes.end(), n);
        if (it == nodes.end()) throw std::invalid_argument("unknown node " + n);
        return static_cast<NodeId>(it - nodes.begin());
    };
    std::vector<std::pair<NodeId, NodeId>> d, b;
    for (const auto& e : directed) {
        auto [a, c] = split_edge(e, "->");
        d.emplace_back(index(a), index(c));
    }
    for (const auto& e : bidirected) {
        auto [a, c] = split_edge(e, "<->");
        b.emplace_back(index(a), index(c));
    }
    return Admg(std::move(specs), std::move(d), std::move(b), index(reward));
}

Admg fig1_graph() {
    return make_graph({"X1", "X2", "X3", "X4", "X5"},
                      {"X2->X4", "X2->X3", "X3->X5", "X3->X1", "X4->X5", "X4->X1", "X5->X1"},
                      {"X2<->X5", "X3<->X1", "X2<->X1"}, "X1");
}

Admg fig6_graph() {
    return make_graph({"X1", "X2", "X3", "X4", "X5", "X6", "Y"},
                      {"X1->X3", "X2->X3", "X2->X4", "X3->X4", "X3->X5", "X3->X6", "X4->X5", "X5->X6", "X6->Y"},
                      {"X1<->X2", "X4<->X6"}, "Y");
}

Admg fig10_graph() {
    return make_graph({"X1", "X2", "X3", "X4", "X5", "X6", "X7", "Y"},
                      {"X1->X2", "X1->X3", "X2->X4", "X2->X3", "X3->X4", "X3->X5", "X3->X6", "X4->X5", "X4->X6",
                       "X5->X7", "X6->X7", "X7->Y"},
                      {"X2<->X5", "X2<->X6"}, "Y");
}

NodeId id(const Admg& g, const std::string& name) {
    auto v = g.find(name);
    if (!v) throw std::invalid_argument("unknown node " + name);
    return *v;
}

NodeSet ids(const Admg& g, const std::vector<std::string>& names) {
    NodeSet out;
    for (const auto& n : names) out.push_back(id(g, n));
    std::sort(out.begin(), out.end());
    return out;
}

Admg random_admg(std::size_t n, double p_directed, double p_bidirected, Rng& rng) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<NodeSpec> specs;
    for (std::size_t v = 0; v < n; ++v) specs.push_back({"V" + std::to_string(v), 2});
    std::vector<std::pair<NodeId, NodeId>> d, b;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a + 1; c < n; ++c) {
            if (unit_uniform(rng) < p_directed) d.emplace_back(order[a], order[c]);
            if (unit_uniform(rng) < p_bidirected) b.emplace_back(order[a], order[c]);
        }
    return Admg(std::move(specs), std::move(d), std::move(b), order.back());
}

namespace {

// Latent-expanded DAG: observed ids first, then one latent per bidirected edge.
struct Expanded {
    std::size_t size = 0;
    std::vector<std::vector<std::size_t>> parents;
    std::vector<std::vector<std::size_t>> children;
};

Expanded expand(const Admg& g) {
    Expanded e;
    const auto bi = g.bidirected_edges();
    e.size = g.num_nodes() + bi.size();
    e.parents.resize(e.size);
    e.children.resize(e.size);
    for (auto [a, b] : g.directed_edges()) {
        e.children[a].push_back(b);
        e.parents[b].push_back(a);
    }
    for (std::size_t k = 0; k < bi.size(); ++k) {
        const std::size_t u = g.num_nodes() + k;
        for (NodeId v : {bi[k].first, bi[k].second}) {
            e.children[u].push_back(v);
            e.parents[v].push_back(u);
        }
    }
    return e;
}

bool is_descendant_or_self_in(const Expanded& e, std::size_t v, const std::set<NodeId>& z) {
    std::vector<std::size_t> stack{v};
    std::vector<bool> seen(e.size, false);
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = true;
        if (z.count(u)) return true;
        for (std::size_t c : e.children[u]) stack.push_back(c);
    }
    return false;
}

}  // namespace

bool brute_force_backdoor(const Admg& g, NodeId i, const std::set<NodeId>& conditioning) {
    const Expanded e = expand(g);
    const NodeId y = g.reward();
    // A path is a node sequence; edge direction between consecutive nodes is
    // looked up in the expanded DAG.
    auto edge_into = [&](std::size_t from, std::size_t to) {
        return std::find(e.children[from].begin(), e.children[from].end(), to) != e.children[from].end();
    };
    std::vector<std::size_t> path{i};
    std::vector<bool> on_path(e.size, false);
    on_path[i] = true;

    auto open = [&]() {
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            const std::size_t prev = path[k - 1], v = path[k], next = path[k + 1];
            const bool collider = edge_into(prev, v) && edge_into(next, v);
            if (collider) {
                if (!is_descendant_or_self_in(e, v, conditioning)) return false;
            } else if (conditioning.count(v)) {
                return false;
            }
        }
        return true;
    };

    std::function<bool()> dfs = [&]() -> bool {
        const std::size_t u = path.back();
        if (u == y) return open();
        std::vector<std::size_t> nbrs = e.parents[u];
        nbrs.insert(nbrs.end(), e.children[u].begin(), e.children[u].end());
        for (std::size_t w : nbrs) {
            if (on_path[w]) continue;
            if (path.size() == 1 && !edge_into(w, i)) continue;  // first edge must point into X_i
            path.push_back(w);
            on_path[w] = true;
            const bool found = dfs();
            on_path[w] = false;
            path.pop_back();
            if (found) return true;
        }
        return false;
    };
    return dfs();
}

ProjectionEdges brute_force_projection(const Admg& g, const std::set<NodeId>& keep) {
    const Expanded e = expand(g);
    auto hidden = [&](std::size_t v) { return v >= g.num_nodes() || !keep.count(v); };

    // kept endpoints of directed paths from `start` whose intermediate nodes are all hidden
    auto endpoints = [&](std::size_t start) {
        std::set<std::size_t> out;
        std::vector<std::size_t> path{start};
        std::function<void()> walk = [&] {
            for (std::size_t c : e.children[path.back()]) {
                if (std::find(path.begin(), path.end(), c) != path.end()) continue;
                if (!hidden(c)) {
                    out.insert(c);
                    continue;
                }
                path.push_back(c);
                walk();
                path.pop_back();
            }
        };
        walk();
        return out;
    };

    ProjectionEdges result;
    for (NodeId v : keep)
        for (std::size_t w : endpoints(v)) result.directed.emplace(v, w);
    for (std::size_t h = 0; h < e.size; ++h) {
        if (!hidden(h)) continue;
        const auto ends = endpoints(h);
        for (auto a = ends.begin(); a != ends.end(); ++a)
            for (auto b = std::next(a); b != ends.end(); ++b) result.bidirected.emplace(*a, *b);
    }
    return result;
}

double brute_force_knapsack(const std::vector<double>& means, const std::vector<int>& costs, int budget) {
    double best = 0.0;
    std::function<void(std::size_t, int, double)> go = [&](std::size_t a, int left, double value) {
        if (a == means.size()) {
            best = std::max(best, value);
            return;
        }
        for (int n = 0; n * costs[a] <= left; ++n) go(a + 1, left - n * costs[a], value + n * means[a]);
    };
    go(0, budget, 0.0);
    return best;
}

Scm random_binary_scm(const Admg& g, Rng& rng) {
    std::vector<Latent> latents;
    for (auto [a, b] : g.bidirected_edges()) latents.push_back({a, b, 0.2 + 0.6 * unit_uniform(rng)});
    std::vector<Cpt> cpts(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        Cpt& c = cpts[v];
        c.parents = g.parents(v);
        for (std::size_t k = 0; k < latents.size(); ++k)
            if (latents[k].a == v || latents[k].b == v) c.latents.push_back(k);
        const std::size_t rows = std::size_t{1} << (c.parents.size() + c.latents.size());
        for (std::size_t r = 0; r < rows; ++r) {
            const double p = 0.05 + 0.9 * unit_uniform(rng);
            c.table.push_back(1.0 - p);
            c.table.push_back(p);
        }
    }
    return Scm(g, std::move(latents), std::move(cpts));
}

}  // namespace cbt
