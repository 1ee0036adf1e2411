#include "cbandit/admg.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <queue>
#include <set>

namespace cbandit {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::GraphInvalid: return "GraphInvalid";
        case ErrorKind::KeepSetInvalid: return "KeepSetInvalid";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ModelInvalid: return "ModelInvalid";
        case ErrorKind::InvalidArm: return "InvalidArm";
        case ErrorKind::StateSpaceTooLarge: return "StateSpaceTooLarge";
        case ErrorKind::NonIntegerCosts: return "NonIntegerCosts";
        case ErrorKind::NonBinaryGraph: return "NonBinaryGraph";
        case ErrorKind::InvalidProbability: return "InvalidProbability";
        case ErrorKind::NoObservations: return "NoObservations";
        case ErrorKind::NoEffectiveSamples: return "NoEffectiveSamples";
        case ErrorKind::ZeroCount: return "ZeroCount";
        case ErrorKind::EmptySlice: return "EmptySlice";
        case ErrorKind::InsufficientBudget: return "InsufficientBudget";
        case ErrorKind::GraphNotNoBackdoor: return "GraphNotNoBackdoor";
        case ErrorKind::NonUniformCost: return "NonUniformCost";
        case ErrorKind::GraphHasHiddenConfounders: return "GraphHasHiddenConfounders";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

void insert_sorted(NodeSet& set, NodeId v) {
    auto it = std::lower_bound(set.begin(), set.end(), v);
    if (it == set.end() || *it != v) set.insert(it, v);
}

bool contains(const NodeSet& set, NodeId v) { return std::binary_search(set.begin(), set.end(), v); }

NodeSet to_set(std::vector<bool> const& mask) {
    NodeSet out;
    for (NodeId v = 0; v < mask.size(); ++v)
        if (mask[v]) out.push_back(v);
    return out;
}

}  // namespace

Admg::Admg(std::vector<NodeSpec> nodes,
           std::vector<std::pair<NodeId, NodeId>> directed,
           std::vector<std::pair<NodeId, NodeId>> bidirected,
           NodeId reward,
           std::optional<NodeSet> intervenable)
    : reward_(reward) {
    const std::size_t n = nodes.size();
    if (n == 0) throw Error(ErrorKind::GraphInvalid, "graph has no nodes");
    std::set<std::string> seen;
    for (auto& spec : nodes) {
        if (spec.name.empty()) throw Error(ErrorKind::GraphInvalid, "empty node name");
        if (!seen.insert(spec.name).second)
            throw Error(ErrorKind::GraphInvalid, "duplicate node name '" + spec.name + "'");
        if (spec.domain_size < 2)
            throw Error(ErrorKind::GraphInvalid, "node '" + spec.name + "' has domain size < 2");
        names_.push_back(std::move(spec.name));
        domain_sizes_.push_back(spec.domain_size);
    }
    parents_.resize(n);
    children_.resize(n);
    siblings_.resize(n);

    for (auto [from, to] : directed) {
        if (from >= n || to >= n) throw Error(ErrorKind::GraphInvalid, "directed edge endpoint out of range");
        if (from == to) throw Error(ErrorKind::GraphInvalid, "self-loop on '" + names_[from] + "'");
        insert_sorted(parents_[to], from);
        insert_sorted(children_[from], to);
    }
    for (auto [a, b] : bidirected) {
        if (a >= n || b >= n) throw Error(ErrorKind::GraphInvalid, "bidirected edge endpoint out of range");
        if (a == b) throw Error(ErrorKind::GraphInvalid, "bidirected self-loop on '" + names_[a] + "'");
        insert_sorted(siblings_[a], b);
        insert_sorted(siblings_[b], a);
    }
    if (reward_ >= n) throw Error(ErrorKind::GraphInvalid, "reward node out of range");

    if (intervenable && !intervenable->empty()) {
        for (NodeId v : *intervenable) {
            if (v >= n) throw Error(ErrorKind::GraphInvalid, "intervenable node out of range");
            if (v == reward_) throw Error(ErrorKind::GraphInvalid, "reward node cannot be intervenable");
            insert_sorted(intervenable_, v);
        }
    } else if (!intervenable) {
        for (NodeId v = 0; v < n; ++v)
            if (v != reward_) intervenable_.push_back(v);
    }

    std::vector<std::size_t> indegree(n);
    for (NodeId v = 0; v < n; ++v) indegree[v] = parents_[v].size();
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (NodeId c : children_[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    if (topo_.size() != n) throw Error(ErrorKind::GraphInvalid, "directed part has a cycle");
}

std::optional<NodeId> Admg::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<NodeId>(it - names_.begin());
}

std::vector<std::pair<NodeId, NodeId>> Admg::directed_edges() const {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId v = 0; v < num_nodes(); ++v)
        for (NodeId c : children_[v]) edges.emplace_back(v, c);
    return edges;
}

std::vector<std::pair<NodeId, NodeId>> Admg::bidirected_edges() const {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId v = 0; v < num_nodes(); ++v)
        for (NodeId s : siblings_[v])
            if (v < s) edges.emplace_back(v, s);
    return edges;
}

bool Admg::has_directed(NodeId from, NodeId to) const { return contains(children_.at(from), to); }

bool Admg::has_bidirected(NodeId a, NodeId b) const { return contains(siblings_.at(a), b); }

bool Admg::is_intervenable(NodeId v) const { return contains(intervenable_, v); }

bool Admg::operator==(const Admg& other) const {
    return names_ == other.names_ && domain_sizes_ == other.domain_sizes_ && parents_ == other.parents_ &&
           siblings_ == other.siblings_ && reward_ == other.reward_ && intervenable_ == other.intervenable_;
}

// ---------------------------------------------------------------------------

std::vector<NodeSet> c_components(const Admg& g) {
    const std::size_t n = g.num_nodes();
    std::vector<int> label(n, -1);
    std::vector<NodeSet> out;
    for (NodeId start = 0; start < n; ++start) {
        if (label[start] >= 0) continue;
        NodeSet comp;
        std::deque<NodeId> queue{start};
        label[start] = static_cast<int>(out.size());
        while (!queue.empty()) {
            NodeId v = queue.front();
            queue.pop_front();
            comp.push_back(v);
            for (NodeId s : g.siblings(v)) {
                if (label[s] < 0) {
                    label[s] = label[start];
                    queue.push_back(s);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

NodeSet c_component_of(const Admg& g, NodeId v) {
    for (auto& comp : c_components(g))
        if (contains(comp, v)) return comp;
    return {v};
}

NodeSet effective_parents(const Admg& g, NodeId j) {
    NodeSet comp = c_component_of(g, j);
    std::vector<bool> mask(g.num_nodes(), false);
    for (NodeId k : comp) {
        mask[k] = true;
        for (NodeId p : g.parents(k)) mask[p] = true;
    }
    mask[j] = false;
    return to_set(mask);
}

NodeSet factorization_parents(const Admg& g, NodeId j) {
    const auto& order = g.topological_order();
    std::vector<bool> allowed(g.num_nodes(), false);
    for (NodeId v : order) {
        allowed[v] = true;
        if (v == j) break;
    }
    // c-component of j among the allowed nodes
    std::vector<bool> in_comp(g.num_nodes(), false);
    std::deque<NodeId> queue{j};
    in_comp[j] = true;
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (NodeId s : g.siblings(v)) {
            if (allowed[s] && !in_comp[s]) {
                in_comp[s] = true;
                queue.push_back(s);
            }
        }
    }
    std::vector<bool> mask(g.num_nodes(), false);
    for (NodeId k = 0; k < g.num_nodes(); ++k) {
        if (!in_comp[k]) continue;
        mask[k] = true;
        for (NodeId p : g.parents(k)) mask[p] = true;
    }
    mask[j] = false;
    return to_set(mask);
}

ComponentParents component_parents(const Admg& g, NodeId i) {
    return {effective_parents(g, i), c_component_of(g, i).size()};
}

NodeSet descendants(const Admg& g, NodeId v) {
    std::vector<bool> seen(g.num_nodes(), false);
    std::deque<NodeId> queue{v};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId c : g.children(u)) {
            if (!seen[c]) {
                seen[c] = true;
                queue.push_back(c);
            }
        }
    }
    seen[v] = false;
    return to_set(seen);
}

NodeSet ancestors(const Admg& g, NodeId v) {
    std::vector<bool> seen(g.num_nodes(), false);
    std::deque<NodeId> queue{v};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId p : g.parents(u)) {
            if (!seen[p]) {
                seen[p] = true;
                queue.push_back(p);
            }
        }
    }
    seen[v] = false;
    return to_set(seen);
}

namespace {

// DAG over observed nodes plus one latent per bidirected edge.
struct ExpandedDag {
    std::vector<NodeSet> parents;
    std::vector<NodeSet> children;
};

ExpandedDag expand(const Admg& g) {
    ExpandedDag d;
    const std::size_t n = g.num_nodes();
    auto bi = g.bidirected_edges();
    d.parents.resize(n + bi.size());
    d.children.resize(n + bi.size());
    for (auto [a, b] : g.directed_edges()) {
        d.children[a].push_back(b);
        d.parents[b].push_back(a);
    }
    for (std::size_t k = 0; k < bi.size(); ++k) {
        NodeId u = n + k;
        for (NodeId end : {bi[k].first, bi[k].second}) {
            d.children[u].push_back(end);
            d.parents[end].push_back(u);
        }
    }
    return d;
}

// Reachability over (node, direction) states; the standard active-trail
// search. `first_into_source` restricts trails to those leaving the source
// against an edge (i.e. through one of its parents).
bool d_connected(const ExpandedDag& d, NodeId source, NodeId target, std::span<const NodeId> conditioning,
                 bool first_into_source) {
    const std::size_t n = d.parents.size();
    std::vector<bool> observed(n, false);
    for (NodeId z : conditioning) observed[z] = true;

    // nodes that are, or have a descendant, in the conditioning set
    std::vector<bool> anc_of_obs(n, false);
    std::deque<NodeId> work(conditioning.begin(), conditioning.end());
    for (NodeId z : conditioning) anc_of_obs[z] = true;
    while (!work.empty()) {
        NodeId v = work.front();
        work.pop_front();
        for (NodeId p : d.parents[v]) {
            if (!anc_of_obs[p]) {
                anc_of_obs[p] = true;
                work.push_back(p);
            }
        }
    }

    // direction: 0 = arrived from a child (moving up), 1 = arrived from a parent (moving down)
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::deque<std::pair<NodeId, int>> queue;
    if (first_into_source) {
        for (NodeId p : d.parents[source]) queue.emplace_back(p, 0);
    } else {
        queue.emplace_back(source, 0);
    }
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == source) continue;
        if (v == target && !observed[v]) return true;
        if (dir == 0 && !observed[v]) {
            for (NodeId p : d.parents[v]) queue.emplace_back(p, 0);
            for (NodeId c : d.children[v]) queue.emplace_back(c, 1);
        } else if (dir == 1) {
            if (!observed[v])
                for (NodeId c : d.children[v]) queue.emplace_back(c, 1);
            if (anc_of_obs[v])
                for (NodeId p : d.parents[v]) queue.emplace_back(p, 0);
        }
    }
    return false;
}

}  // namespace

bool has_unblocked_backdoor(const Admg& g, NodeId i, std::span<const NodeId> conditioning) {
    return d_connected(expand(g), i, g.reward(), conditioning, true);
}

bool identifiable_sufficient(const Admg& g, NodeId i) {
    NodeSet comp = c_component_of(g, i);
    for (NodeId c : g.children(i))
        if (contains(comp, c)) return false;
    return true;
}

Admg latent_project(const Admg& g, std::span<const NodeId> keep_in) {
    const std::size_t n = g.num_nodes();
    NodeSet keep(keep_in.begin(), keep_in.end());
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (NodeId v : keep)
        if (v >= n) throw Error(ErrorKind::KeepSetInvalid, "keep set contains unknown node id " + std::to_string(v));
    if (!contains(keep, g.reward()))
        throw Error(ErrorKind::KeepSetInvalid, "keep set must contain the reward node '" + g.name(g.reward()) + "'");

    std::vector<NodeId> new_id(n, n);
    for (std::size_t k = 0; k < keep.size(); ++k) new_id[keep[k]] = k;
    auto kept = [&](NodeId v) { return new_id[v] < n; };

    // kept nodes reachable from `start`'s children through dropped nodes only
    auto reach_through_hidden = [&](const NodeSet& first_hop) {
        NodeSet found;
        std::vector<bool> seen(n, false);
        std::deque<NodeId> queue;
        for (NodeId c : first_hop) {
            if (seen[c]) continue;
            seen[c] = true;
            queue.push_back(c);
        }
        while (!queue.empty()) {
            NodeId v = queue.front();
            queue.pop_front();
            if (kept(v)) {
                found.push_back(v);
                continue;
            }
            for (NodeId c : g.children(v)) {
                if (!seen[c]) {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        std::sort(found.begin(), found.end());
        return found;
    };

    std::set<std::pair<NodeId, NodeId>> directed;
    std::set<std::pair<NodeId, NodeId>> bidirected;
    auto add_bidirected_all = [&](const NodeSet& ends) {
        for (std::size_t a = 0; a < ends.size(); ++a)
            for (std::size_t b = a + 1; b < ends.size(); ++b)
                bidirected.emplace(new_id[ends[a]], new_id[ends[b]]);
    };

    for (NodeId v : keep)
        for (NodeId target : reach_through_hidden(g.children(v)))
            if (target != v) directed.emplace(new_id[v], new_id[target]);

    // hidden sources: dropped observed nodes
    for (NodeId u = 0; u < n; ++u)
        if (!kept(u)) add_bidirected_all(reach_through_hidden(g.children(u)));
    // hidden sources: the latent behind each bidirected edge
    for (auto [a, b] : g.bidirected_edges()) add_bidirected_all(reach_through_hidden(NodeSet{a, b}));

    std::vector<NodeSpec> nodes;
    for (NodeId v : keep) nodes.push_back({g.name(v), g.domain_size(v)});
    NodeSet interv;
    for (NodeId v : g.intervenable())
        if (kept(v)) interv.push_back(new_id[v]);
    return Admg(std::move(nodes), {directed.begin(), directed.end()}, {bidirected.begin(), bidirected.end()},
                new_id[g.reward()], interv.empty() ? std::optional<NodeSet>(NodeSet{}) : std::optional<NodeSet>(interv));
}

ReducedGraph reduce_to_h_i(const Admg& g, NodeId i) {
    NodeSet w = component_parents(g, i).nodes;
    insert_sorted(w, i);
    insert_sorted(w, g.reward());
    Admg h = latent_project(g, w);
    auto pos = std::lower_bound(w.begin(), w.end(), i) - w.begin();
    return {std::move(h), w, static_cast<NodeId>(pos)};
}

}  // namespace cbandit
