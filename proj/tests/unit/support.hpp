#pragma once

#include "cbandit/admg.hpp"
#include "cbandit/arms.hpp"
#include "cbandit/rng.hpp"
#include "cbandit/scm.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cbt {

using namespace cbandit;

/// Builds a graph from names and "A->B" / "A<->B" strings.
Admg make_graph(const std::vector<std::string>& nodes, const std::vector<std::string>& directed,
                const std::vector<std::string>& bidirected, const std::string& reward);

Admg fig1_graph();   // five nodes, reward X1
Admg fig6_graph();   // six causes + Y, two bidirected edges
Admg fig10_graph();  // seven causes + Y, backdoor paths

NodeId id(const Admg& g, const std::string& name);
NodeSet ids(const Admg& g, const std::vector<std::string>& names);

/// Random ADMG on n nodes: directed edges follow a random order, reward is
/// the last node in that order.
Admg random_admg(std::size_t n, double p_directed, double p_bidirected, Rng& rng);

/// Explicit path enumeration on the latent-expanded DAG. True iff some
/// simple path from i to the reward starting with an edge into i is
/// d-connected given `conditioning`.
bool brute_force_backdoor(const Admg& g, NodeId i, const std::set<NodeId>& conditioning = {});

/// Latent projection by enumerating every directed path through dropped
/// nodes. Returns (directed, bidirected) edge sets in original ids.
struct ProjectionEdges {
    std::set<std::pair<NodeId, NodeId>> directed;
    std::set<std::pair<NodeId, NodeId>> bidirected;  // (smaller, larger)
};
ProjectionEdges brute_force_projection(const Admg& g, const std::set<NodeId>& keep);

/// max sum n_a mu_a over count vectors with sum n_a c_a <= budget.
double brute_force_knapsack(const std::vector<double>& means, const std::vector<int>& costs, int budget);

/// Binary SCM on g where every CPT row is drawn uniformly from [0.05, 0.95].
Scm random_binary_scm(const Admg& g, Rng& rng);

}  // namespace cbt
