#pragma once

#include "cbandit/admg.hpp"
#include "cbandit/obs_log.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cbandit {

/// Learned conditionals over a reduced graph H_i for the arm do(X_i = x).
struct BayesNet {
    Admg graph;                      // H_i
    std::vector<NodeId> original;    // H_i id -> id in the source graph
    NodeId target = 0;               // X_i in H_i ids
    int value = 0;                   // x
    std::vector<NodeSet> z;          // per H_i node
    std::vector<bool> in_component;  // V_j in C_i
    std::vector<std::vector<double>> table;  // [j][code * d_j + v]

    std::size_t code(NodeId j, std::span<const int> values_h) const;
};

/// max(1, floor(sqrt(n))).
std::size_t default_smoothing_threshold(std::size_t num_observations);

/// Add-one smoothed conditionals (N_zv + 1) / (N_z + d). Nodes outside
/// C_i fall back to 1/d when N_z < threshold. `records` index into `log`
/// whose values use source-graph ids.
BayesNet learn_bayes_net(const ObsLog& log, std::span<const std::size_t> records, const ReducedGraph& h, int x,
                         std::size_t threshold);

/// P(Y = 1 | do(X_i = x)) under the learned factorization, summing over
/// every realization of H_i \ {X_i, Y} and of X_i inside its c-component.
/// Throws Error(StateSpaceTooLarge) beyond 2^20 terms.
double mu_from_bayes_net(const BayesNet& d);

/// reduce_to_h_i + learn_bayes_net + mu_from_bayes_net.
double estimate_mu_bayes(const ObsLog& log, std::span<const std::size_t> records, const Admg& g, NodeId i, int x,
                         std::size_t threshold);

}  // namespace cbandit
