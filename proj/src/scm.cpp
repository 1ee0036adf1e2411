#include "cbandit/scm.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <functional>

namespace cbandit {

namespace {

constexpr double kRowTolerance = 1e-12;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

struct Scm::Plan {
    std::vector<std::size_t> latents;  // relevant latents
    std::vector<NodeId> nodes;         // relevant observed nodes, topological
    std::uint64_t states = 1;
};

Scm::Scm(Admg graph, std::vector<Latent> latents, std::vector<Cpt> cpts)
    : graph_(std::move(graph)), arms_(graph_), latents_(std::move(latents)), cpts_(std::move(cpts)) {
    const std::size_t n = graph_.num_nodes();
    if (cpts_.size() != n)
        throw Error(ErrorKind::ModelInvalid,
                    "expected " + std::to_string(n) + " CPTs, got " + std::to_string(cpts_.size()));
    if (graph_.domain_size(graph_.reward()) != 2)
        throw Error(ErrorKind::ModelInvalid, "reward node '" + graph_.name(graph_.reward()) + "' must be binary");
    for (auto& l : latents_) {
        if (l.a >= n || l.b >= n || !graph_.has_bidirected(l.a, l.b))
            throw Error(ErrorKind::ModelInvalid, "latent does not match a bidirected edge");
        if (!is_probability(l.p_one)) throw Error(ErrorKind::InvalidProbability, "latent marginal outside [0,1]");
    }
    strides_.resize(n);
    for (NodeId v = 0; v < n; ++v) {
        const Cpt& c = cpts_[v];
        const std::string& name = graph_.name(v);
        for (NodeId p : c.parents)
            if (p >= n || !graph_.has_directed(p, v))
                throw Error(ErrorKind::ModelInvalid, "CPT of '" + name + "' uses a non-parent");
        for (std::size_t l : c.latents)
            if (l >= latents_.size() || (latents_[l].a != v && latents_[l].b != v))
                throw Error(ErrorKind::ModelInvalid, "CPT of '" + name + "' uses a latent not incident to it");
        // strides, last listed least significant
        std::vector<std::size_t> radix;
        for (NodeId p : c.parents) radix.push_back(static_cast<std::size_t>(graph_.domain_size(p)));
        for (std::size_t k = 0; k < c.latents.size(); ++k) radix.push_back(2);
        std::vector<std::size_t> stride(radix.size());
        std::size_t rows = 1;
        for (std::size_t k = radix.size(); k-- > 0;) {
            stride[k] = rows;
            rows *= radix[k];
        }
        strides_[v] = std::move(stride);
        const auto d = static_cast<std::size_t>(graph_.domain_size(v));
        if (c.table.size() != rows * d)
            throw Error(ErrorKind::ModelInvalid, "CPT of '" + name + "' has " + std::to_string(c.table.size()) +
                                                     " entries, expected " + std::to_string(rows * d));
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double p = c.table[r * d + k];
                if (!is_probability(p))
                    throw Error(ErrorKind::InvalidProbability, "CPT of '" + name + "' has an entry outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowTolerance)
                throw Error(ErrorKind::InvalidProbability,
                            "CPT row " + std::to_string(r) + " of '" + name + "' does not sum to 1");
        }
    }
}

int Scm::sample(ArmIndex arm, Rng& rng, Assignment& out) const {
    const Arm& a = arms_[arm];
    const std::size_t n = graph_.num_nodes();
    out.assign(n, 0);
    std::vector<int> lat(latents_.size());
    for (std::size_t l = 0; l < latents_.size(); ++l) lat[l] = unit_uniform(rng) < latents_[l].p_one ? 1 : 0;
    for (NodeId v : graph_.topological_order()) {
        double u = unit_uniform(rng);
        if (!a.observe && a.node == v) {
            out[v] = a.value;
            continue;
        }
        const Cpt& c = cpts_[v];
        const auto& stride = strides_[v];
        std::size_t row = 0;
        std::size_t k = 0;
        for (NodeId p : c.parents) row += stride[k++] * static_cast<std::size_t>(out[p]);
        for (std::size_t l : c.latents) row += stride[k++] * static_cast<std::size_t>(lat[l]);
        const int d = graph_.domain_size(v);
        const double* probs = c.table.data() + row * static_cast<std::size_t>(d);
        int value = d - 1;
        double acc = 0.0;
        for (int x = 0; x < d - 1; ++x) {
            acc += probs[x];
            if (u < acc) {
                value = x;
                break;
            }
        }
        out[v] = value;
    }
    return out[graph_.reward()];
}

Scm::Plan Scm::make_plan(ArmIndex arm) const {
    const Arm& a = arms_.at(arm);
    const std::size_t n = graph_.num_nodes();
    std::vector<bool> need(n, false);
    std::vector<bool> need_latent(latents_.size(), false);
    std::vector<NodeId> stack{graph_.reward()};
    need[graph_.reward()] = true;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        if (!a.observe && a.node == v) continue;
        for (NodeId p : cpts_[v].parents) {
            if (!need[p]) {
                need[p] = true;
                stack.push_back(p);
            }
        }
        for (std::size_t l : cpts_[v].latents) need_latent[l] = true;
    }
    Plan plan;
    auto mul = [&](std::uint64_t d) {
        plan.states = plan.states > kOracleStateCap ? plan.states : plan.states * d;
    };
    for (std::size_t l = 0; l < latents_.size(); ++l) {
        if (!need_latent[l]) continue;
        plan.latents.push_back(l);
        mul(2);
    }
    for (NodeId v : graph_.topological_order()) {
        if (!need[v]) continue;
        plan.nodes.push_back(v);
        if (a.observe || a.node != v) mul(static_cast<std::uint64_t>(graph_.domain_size(v)));
    }
    return plan;
}

std::uint64_t Scm::oracle_state_count(ArmIndex arm) const { return make_plan(arm).states; }

double Scm::oracle_mean(ArmIndex arm) const {
    const Arm& a = arms_.at(arm);
    Plan plan = make_plan(arm);
    if (plan.states > kOracleStateCap)
        throw Error(ErrorKind::StateSpaceTooLarge, "oracle enumeration for arm " + arms_.label(arm) + " exceeds 2^24 states");
    const NodeId y = graph_.reward();
    std::vector<int> values(graph_.num_nodes(), 0);
    std::vector<int> lat(latents_.size(), 0);
    double total = 0.0;

    std::function<void(std::size_t, double)> visit_nodes = [&](std::size_t k, double w) {
        if (k == plan.nodes.size()) {
            if (values[y] == 1) total += w;
            return;
        }
        NodeId v = plan.nodes[k];
        if (!a.observe && a.node == v) {
            values[v] = a.value;
            visit_nodes(k + 1, w);
            return;
        }
        const Cpt& c = cpts_[v];
        const auto& stride = strides_[v];
        std::size_t row = 0;
        std::size_t s = 0;
        for (NodeId p : c.parents) row += stride[s++] * static_cast<std::size_t>(values[p]);
        for (std::size_t l : c.latents) row += stride[s++] * static_cast<std::size_t>(lat[l]);
        const int d = graph_.domain_size(v);
        for (int x = 0; x < d; ++x) {
            double p = c.table[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(x)];
            if (p == 0.0) continue;
            values[v] = x;
            visit_nodes(k + 1, w * p);
        }
    };
    std::function<void(std::size_t, double)> visit_latents = [&](std::size_t k, double w) {
        if (k == plan.latents.size()) {
            visit_nodes(0, w);
            return;
        }
        std::size_t l = plan.latents[k];
        double p1 = latents_[l].p_one;
        if (p1 < 1.0) {
            lat[l] = 0;
            visit_latents(k + 1, w * (1.0 - p1));
        }
        if (p1 > 0.0) {
            lat[l] = 1;
            visit_latents(k + 1, w * p1);
        }
    };
    visit_latents(0, 1.0);
    return total;
}

std::vector<double> Scm::oracle_means() const {
    std::vector<double> out(arms_.size());
    for (ArmIndex k = 0; k < arms_.size(); ++k) out[k] = oracle_mean(k);
    return out;
}

std::vector<MonteCarloMean> monte_carlo_means(const Scm& scm, std::size_t samples, Rng& rng) {
    std::vector<MonteCarloMean> out(scm.arms().size());
    Assignment buf;
    for (ArmIndex k = 0; k < out.size(); ++k) {
        std::size_t ones = 0;
        for (std::size_t s = 0; s < samples; ++s) ones += static_cast<std::size_t>(scm.sample(k, rng, buf));
        double m = samples ? static_cast<double>(ones) / static_cast<double>(samples) : 0.0;
        double se = samples ? std::sqrt(m * (1.0 - m) / static_cast<double>(samples)) : 0.0;
        out[k] = {m, 1.96 * se};
    }
    return out;
}

Scm make_xor_model(const Admg& g, Rng& rng, double latent_p, double xor_prob) {
    for (NodeId v = 0; v < g.num_nodes(); ++v)
        if (g.domain_size(v) != 2)
            throw Error(ErrorKind::NonBinaryGraph, "node '" + g.name(v) + "' is not binary");
    if (!is_probability(latent_p) || !is_probability(xor_prob))
        throw Error(ErrorKind::InvalidProbability, "XOR model parameters must lie in [0,1]");

    std::vector<Latent> latents;
    for (auto [a, b] : g.bidirected_edges()) latents.push_back({a, b, latent_p});

    std::vector<Cpt> cpts(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        Cpt& c = cpts[v];
        c.parents = g.parents(v);
        for (std::size_t l = 0; l < latents.size(); ++l)
            if (latents[l].a == v || latents[l].b == v) c.latents.push_back(l);
        const std::size_t inputs = c.parents.size() + c.latents.size();
        if (inputs == 0) {
            double eps = unit_uniform(rng);
            double p1 = 0.5 + 0.5 * eps;
            c.table = {1.0 - p1, p1};
            continue;
        }
        const std::size_t rows = std::size_t{1} << inputs;
        c.table.resize(rows * 2);
        for (std::size_t r = 0; r < rows; ++r) {
            bool parity = std::popcount(r) % 2 == 1;
            double p1 = parity ? xor_prob : 1.0 - xor_prob;
            c.table[2 * r] = 1.0 - p1;
            c.table[2 * r + 1] = p1;
        }
    }
    return Scm(g, std::move(latents), std::move(cpts));
}

Admg parallel_graph(std::size_t n) {
    std::vector<NodeSpec> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back({"X" + std::to_string(i + 1), 2});
        edges.emplace_back(i, n);
    }
    nodes.push_back({"Y", 2});
    return Admg(std::move(nodes), std::move(edges), {}, n);
}

Scm make_parallel_model(const ParallelParams& params) {
    const std::size_t n = params.n;
    if (n < 1) throw Error(ErrorKind::InvalidProbability, "parallel model needs N >= 1");
    std::vector<double> p = params.p;
    if (p.empty()) {
        p.assign(n, 0.5);
        p[0] = 0.02;
        if (n > 1) p[1] = 0.02;
    }
    if (p.size() != n)
        throw Error(ErrorKind::InvalidProbability, "expected " + std::to_string(n) + " marginals, got " +
                                                       std::to_string(p.size()));
    for (double pi : p)
        if (!is_probability(pi)) throw Error(ErrorKind::InvalidProbability, "marginal outside [0,1]");
    const double eps = params.eps;
    if (!std::isfinite(eps) || eps < 0.0 || eps > 0.5)
        throw Error(ErrorKind::InvalidProbability, "eps must lie in [0, 0.5]");
    const double p1 = p[0];
    // with p1 = 1 the X1 = 0 row is never reached observationally
    const double eps_prime = p1 < 1.0 ? p1 * eps / (1.0 - p1) : 0.0;
    if (eps_prime > 0.5) throw Error(ErrorKind::InvalidProbability, "eps' = p1 eps / (1 - p1) exceeds 0.5");

    Admg g = parallel_graph(n);
    std::vector<Cpt> cpts(n + 1);
    for (std::size_t i = 0; i < n; ++i) cpts[i].table = {1.0 - p[i], p[i]};
    Cpt& y = cpts[n];
    y.parents = {0};
    const double lo = 0.5 - eps_prime;
    const double hi = 0.5 + eps;
    y.table = {1.0 - lo, lo, 1.0 - hi, hi};
    return Scm(std::move(g), {}, std::move(cpts));
}

}  // namespace cbandit
