#pragma once

#include "cbandit/admg.hpp"
#include "cbandit/arms.hpp"
#include "cbandit/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cbandit {

/// Binary hidden confounder behind the bidirected edge a<->b.
struct Latent {
    NodeId a = 0;
    NodeId b = 0;
    double p_one = 0.5;
};

/// P(V | observed parents, latents). Rows are indexed mixed-radix over
/// `parents` (domain sizes from the graph) then `latents` (binary), first
/// listed most significant; each row holds domain_size(V) probabilities.
struct Cpt {
    std::vector<NodeId> parents;
    std::vector<std::size_t> latents;
    std::vector<double> table;
};

/// One value per observed node.
using Assignment = std::vector<int>;

inline constexpr std::uint64_t kOracleStateCap = std::uint64_t{1} << 24;

class Scm {
public:
    /// Validates CPT shapes, parent sets against the graph, latent incidence,
    /// row sums and a binary reward. Throws Error(ModelInvalid) or
    /// Error(InvalidProbability).
    Scm(Admg graph, std::vector<Latent> latents, std::vector<Cpt> cpts);

    const Admg& graph() const noexcept { return graph_; }
    const ArmSet& arms() const noexcept { return arms_; }
    const std::vector<Latent>& latents() const noexcept { return latents_; }
    const Cpt& cpt(NodeId v) const { return cpts_.at(v); }

    /// Ancestral sample under `arm`; writes every observed value into `out`
    /// and returns the reward. Consumes exactly one uniform per latent and
    /// one per observed node, clamped or not, so streams stay aligned
    /// across arms.
    int sample(ArmIndex arm, Rng& rng, Assignment& out) const;

    /// Exact E[Y | arm] for every arm index. Throws
    /// Error(StateSpaceTooLarge) past kOracleStateCap configurations.
    std::vector<double> oracle_means() const;
    double oracle_mean(ArmIndex arm) const;

    /// Number of joint configurations oracle_mean would enumerate.
    std::uint64_t oracle_state_count(ArmIndex arm) const;

private:
    struct Plan;
    Plan make_plan(ArmIndex arm) const;

    Admg graph_;
    ArmSet arms_;
    std::vector<Latent> latents_;
    std::vector<Cpt> cpts_;
    std::vector<std::vector<std::size_t>> strides_;  // per node, per parent then latent
};

struct MonteCarloMean {
    double mean = 0.0;
    double half_width = 0.0;  // 95% normal interval
};

std::vector<MonteCarloMean> monte_carlo_means(const Scm& scm, std::size_t samples, Rng& rng);

/// Noisy-XOR model: every node with an observed or latent parent equals the
/// XOR of them with probability `xor_prob`, else its complement; other nodes
/// are Be(0.5 + 0.5 eps) with eps ~ U(0,1) drawn from `rng`. One Be(latent_p)
/// latent per bidirected edge. Throws Error(NonBinaryGraph).
Scm make_xor_model(const Admg& g, Rng& rng, double latent_p = 0.5, double xor_prob = 0.8);

struct ParallelParams {
    std::size_t n = 50;
    std::vector<double> p;  // size n; empty means p1 = p2 = 0.02, rest 0.5
    double eps = 0.3;
};

/// X_1..X_N -> Y, X_i ~ Be(p_i), Y ~ Be(0.5 + eps) if X_1 = 1 else
/// Be(0.5 - eps'), eps' = p_1 eps / (1 - p_1). Throws
/// Error(InvalidProbability).
Scm make_parallel_model(const ParallelParams& params);

Admg parallel_graph(std::size_t n);

}  // namespace cbandit
