#include "cbandit/bayes_net.hpp"

#include "cbandit/error.hpp"

#include <cmath>

namespace cbandit {

namespace {

constexpr std::size_t kMaxMarginalTerms = std::size_t{1} << 20;

}  // namespace

std::size_t BayesNet::code(NodeId j, std::span<const int> values_h) const {
    std::size_t c = 0;
    for (NodeId p : z[j]) c = c * static_cast<std::size_t>(graph.domain_size(p)) + static_cast<std::size_t>(values_h[p]);
    return c;
}

std::size_t default_smoothing_threshold(std::size_t num_observations) {
    auto t = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(num_observations))));
    return t < 1 ? 1 : t;
}

BayesNet learn_bayes_net(const ObsLog& log, std::span<const std::size_t> records, const ReducedGraph& h, int x,
                         std::size_t threshold) {
    BayesNet d{h.graph, h.original, h.target, x, {}, {}, {}};
    const Admg& g = d.graph;
    const std::size_t n = g.num_nodes();
    d.z.resize(n);
    d.in_component.assign(n, false);
    for (NodeId v : c_component_of(g, d.target)) d.in_component[v] = true;
    d.table.resize(n);

    std::vector<std::vector<std::size_t>> joint(n);
    std::vector<std::vector<std::size_t>> marginal(n);
    for (NodeId j = 0; j < n; ++j) {
        d.z[j] = factorization_parents(g, j);
        std::size_t codes = 1;
        for (NodeId p : d.z[j]) {
            codes *= static_cast<std::size_t>(g.domain_size(p));
            if (codes > kMaxMarginalTerms)
                throw Error(ErrorKind::StateSpaceTooLarge, "conditioning set of '" + g.name(j) + "' is too large");
        }
        joint[j].assign(codes * static_cast<std::size_t>(g.domain_size(j)), 0);
        marginal[j].assign(codes, 0);
    }

    std::vector<int> values(n);
    for (std::size_t r : records) {
        for (NodeId k = 0; k < n; ++k) values[k] = log.value(r, d.original[k]);
        for (NodeId j = 0; j < n; ++j) {
            std::size_t c = d.code(j, values);
            ++marginal[j][c];
            ++joint[j][c * static_cast<std::size_t>(g.domain_size(j)) + static_cast<std::size_t>(values[j])];
        }
    }

    for (NodeId j = 0; j < n; ++j) {
        const auto dom = static_cast<std::size_t>(g.domain_size(j));
        auto& table = d.table[j];
        table.resize(joint[j].size());
        for (std::size_t c = 0; c < marginal[j].size(); ++c) {
            const std::size_t nz = marginal[j][c];
            const bool smooth = d.in_component[j] || nz >= threshold;
            for (std::size_t v = 0; v < dom; ++v) {
                table[c * dom + v] = smooth ? (static_cast<double>(joint[j][c * dom + v]) + 1.0) /
                                                  (static_cast<double>(nz) + static_cast<double>(dom))
                                            : 1.0 / static_cast<double>(dom);
            }
        }
    }
    return d;
}

double mu_from_bayes_net(const BayesNet& d) {
    const Admg& g = d.graph;
    const std::size_t n = g.num_nodes();
    const NodeId y = g.reward();
    const NodeId i = d.target;

    std::vector<NodeId> free_nodes;
    std::size_t terms = static_cast<std::size_t>(g.domain_size(i));
    for (NodeId v = 0; v < n; ++v) {
        if (v == i || v == y) continue;
        free_nodes.push_back(v);
        terms *= static_cast<std::size_t>(g.domain_size(v));
        if (terms > kMaxMarginalTerms)
            throw Error(ErrorKind::StateSpaceTooLarge, "Bayes-net marginalization exceeds 2^20 terms");
    }

    std::vector<int> w(n, 0);
    w[y] = 1;
    std::vector<int> with_x;
    double total = 0.0;
    while (true) {
        with_x = w;
        with_x[i] = d.value;
        double outside = 1.0;
        for (NodeId j = 0; j < n; ++j) {
            if (d.in_component[j]) continue;
            const auto dom = static_cast<std::size_t>(g.domain_size(j));
            outside *= d.table[j][d.code(j, with_x) * dom + static_cast<std::size_t>(with_x[j])];
        }
        if (outside != 0.0) {
            double inside_sum = 0.0;
            for (int xp = 0; xp < g.domain_size(i); ++xp) {
                w[i] = xp;
                double inside = 1.0;
                for (NodeId j = 0; j < n; ++j) {
                    if (!d.in_component[j]) continue;
                    const auto dom = static_cast<std::size_t>(g.domain_size(j));
                    inside *= d.table[j][d.code(j, w) * dom + static_cast<std::size_t>(w[j])];
                }
                inside_sum += inside;
            }
            total += inside_sum * outside;
        }
        std::size_t k = free_nodes.size();
        while (k > 0) {
            NodeId v = free_nodes[k - 1];
            if (++w[v] < g.domain_size(v)) break;
            w[v] = 0;
            --k;
        }
        if (k == 0) break;
    }
    return total;
}

double estimate_mu_bayes(const ObsLog& log, std::span<const std::size_t> records, const Admg& g, NodeId i, int x,
                         std::size_t threshold) {
    return mu_from_bayes_net(learn_bayes_net(log, records, reduce_to_h_i(g, i), x, threshold));
}

}  // namespace cbandit
