#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cbandit {

using NodeId = std::size_t;

// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;

struct NodeSpec {
    std::string name;
    int domain_size = 2;
};

/// Acyclic directed mixed graph over observed variables.
///
/// Bidirected edges stand for hidden common causes and are stored natively;
/// path-based algorithms expand each A<->B into A <- U_AB -> B.
/// Node ids are the positions in the node list given at construction and are
/// stable for the lifetime of the value.
class Admg {
public:
    /// Validates acyclicity, edge endpoints, domain sizes and the reward /
    /// intervenable split; throws Error(GraphInvalid) on violation.
    /// No `intervenable` list means every node except the reward.
    Admg(std::vector<NodeSpec> nodes,
         std::vector<std::pair<NodeId, NodeId>> directed,
         std::vector<std::pair<NodeId, NodeId>> bidirected,
         NodeId reward,
         std::optional<NodeSet> intervenable = std::nullopt);

    std::size_t num_nodes() const noexcept { return names_.size(); }
    const std::string& name(NodeId v) const { return names_.at(v); }
    std::optional<NodeId> find(const std::string& name) const;
    int domain_size(NodeId v) const { return domain_sizes_.at(v); }

    const NodeSet& parents(NodeId v) const { return parents_.at(v); }
    const NodeSet& children(NodeId v) const { return children_.at(v); }
    const NodeSet& siblings(NodeId v) const { return siblings_.at(v); }

    std::vector<std::pair<NodeId, NodeId>> directed_edges() const;
    /// Each unordered pair once, as (smaller id, larger id).
    std::vector<std::pair<NodeId, NodeId>> bidirected_edges() const;
    bool has_directed(NodeId from, NodeId to) const;
    bool has_bidirected(NodeId a, NodeId b) const;

    NodeId reward() const noexcept { return reward_; }
    const NodeSet& intervenable() const noexcept { return intervenable_; }
    bool is_intervenable(NodeId v) const;

    /// Kahn's order, smallest id first among ready nodes.
    const std::vector<NodeId>& topological_order() const noexcept { return topo_; }

    bool operator==(const Admg& other) const;

private:
    std::vector<std::string> names_;
    std::vector<int> domain_sizes_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<NodeSet> siblings_;
    NodeId reward_;
    NodeSet intervenable_;
    std::vector<NodeId> topo_;
};

/// Connected components of the bidirected part, each sorted, ordered by
/// smallest member.
std::vector<NodeSet> c_components(const Admg& g);
NodeSet c_component_of(const Admg& g, NodeId v);

/// (union of Pa(V_k) over V_k in C_j, union C_j) minus V_j, with C_j the
/// c-component of V_j in the whole graph.
NodeSet effective_parents(const Admg& g, NodeId j);

/// Conditioning set of V_j in the c-component factorization of P(v):
/// (T_j union Pa(T_j)) minus V_j, where T_j is the c-component of V_j in the
/// subgraph induced by V_j and its predecessors in topological_order().
/// P(v_j | predecessors) = P(v_j | this set), which makes the plug-in
/// factorization a proper distribution. Used by all estimators.
NodeSet factorization_parents(const Admg& g, NodeId j);

struct ComponentParents {
    NodeSet nodes;
    std::size_t component_size = 1;  // k_i = |C_i|
};

/// effective_parents for an intervenable node, plus the size of its
/// c-component.
ComponentParents component_parents(const Admg& g, NodeId i);

/// Nodes reachable by a directed path, excluding v.
NodeSet descendants(const Admg& g, NodeId v);
NodeSet ancestors(const Admg& g, NodeId v);

/// True iff some path from X_i to the reward that starts with an edge into
/// X_i is d-connected given `conditioning` (bidirected edges count as latent
/// forks).
bool has_unblocked_backdoor(const Admg& g, NodeId i, std::span<const NodeId> conditioning = {});

/// True iff no child of X_i lies in X_i's c-component.
bool identifiable_sufficient(const Admg& g, NodeId i);

/// Latent projection onto `keep` (which must contain the reward). Dropped
/// observed nodes and bidirected edges are treated as hidden. The returned
/// graph's node k is the k-th smallest id of `keep`.
Admg latent_project(const Admg& g, std::span<const NodeId> keep);

struct ReducedGraph {
    Admg graph;
    std::vector<NodeId> original;  // reduced id -> id in the source graph
    NodeId target;                 // X_i in reduced ids
};

/// Projection onto W_i = {X_i} union component_parents(i) union {Y}.
ReducedGraph reduce_to_h_i(const Admg& g, NodeId i);

}  // namespace cbandit
