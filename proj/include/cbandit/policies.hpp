#pragma once

#include "cbandit/arms.hpp"
#include "cbandit/scm.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbandit {

enum class PolicyKind {
    CumulativeUcb,
    UniformCostCausalUcb,
    BudgetedKube,
    SimpleBudgeted,
    SimpleNoBackdoor,
    GammaNb,
    SuccessiveRejects,
};

std::string_view to_string(PolicyKind kind);
/// Throws Error(ConfigInvalid) for unknown names.
PolicyKind parse_policy_kind(std::string_view name);
/// Cumulative-regret policies; the rest return a chosen arm.
bool is_cumulative(PolicyKind kind);

enum class EstimatorPath { Bayes, Factorized };

struct PolicyConfig {
    PolicyKind kind = PolicyKind::CumulativeUcb;
    double budget = 0.0;
    CostSet costs;
    std::uint64_t seed = 0;
    /// Cumulative UCB exploitation index (mu_hat + bonus) / c instead of mu_hat + bonus.
    bool cost_normalized_index = true;
    /// Simple-regret initial estimates.
    EstimatorPath estimator = EstimatorPath::Bayes;
    /// Bayes-net fallback threshold; default max(1, floor(sqrt(#observations))).
    std::optional<std::size_t> smoothing_threshold;
    /// Lets gamma-NB run with non-uniform interventional costs.
    bool allow_nonuniform_costs = false;
    /// Record an estimator snapshot every this many rounds (0 = never).
    std::size_t snapshot_interval = 0;
};

enum class Phase { Init, Observe, Exploit, Explore, ExploreExtra, Reject };

std::string_view to_string(Phase phase);

struct Round {
    std::size_t t = 0;
    ArmIndex arm = 0;
    double cost = 0.0;
    int reward = 0;
    double budget_remaining = 0.0;
    Phase phase = Phase::Init;
    /// Observation guard state at decision time: beta and N_0^{t-1}.
    double beta = 0.0;
    std::size_t n0_before = 0;
};

struct Snapshot {
    std::size_t t = 0;
    std::vector<double> mu_hat;
    std::vector<double> ucb;
    std::vector<std::size_t> n;
    std::vector<std::size_t> s;
};

struct PolicyTrace {
    PolicyKind policy = PolicyKind::CumulativeUcb;
    double budget = 0.0;
    std::uint64_t seed = 0;
    std::vector<Round> rounds;
    std::optional<ArmIndex> chosen;
    std::vector<double> final_estimates;
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;

    // simple-regret phase bookkeeping
    double observation_cost = 0.0;
    double exploration_cost = 0.0;
    std::size_t pulls_per_infrequent_arm = 0;
    std::vector<ArmIndex> infrequent;

    double total_cost() const;
};

/// Budgeted causal UCB with observational sharing for cumulative regret.
/// Throws Error(InsufficientBudget) if B < 1 + sum of interventional costs.
PolicyTrace run_cumulative_ucb(const Scm& scm, const PolicyConfig& config);

/// Cumulative UCB with every cost taken as 1 in the index and the beta update,
/// charging the true costs. Throws Error(GraphHasHiddenConfounders).
PolicyTrace run_uniform_cost_causal_ucb(const Scm& scm, const PolicyConfig& config);

/// Cost-normalized UCB over all arms without observational sharing.
PolicyTrace run_budgeted_kube(const Scm& scm, const PolicyConfig& config);

/// Budgeted simple-regret policy: observe with half the budget, explore the
/// infrequent arms with the rest. Throws Error(InsufficientBudget) for B < 2.
PolicyTrace run_simple_budgeted(const Scm& scm, const PolicyConfig& config);

/// Simple-regret policy with conditional-frequency estimates and unstratified q-hat.
/// Throws Error(GraphNotNoBackdoor).
PolicyTrace run_simple_nobackdoor(const Scm& scm, const PolicyConfig& config);

/// Simple-regret skeleton with the m'(q) infrequency threshold. Throws
/// Error(GraphNotNoBackdoor) or Error(NonUniformCost).
PolicyTrace run_gamma_nb(const Scm& scm, const PolicyConfig& config);

/// Successive Rejects over every arm with a cost-aware horizon.
PolicyTrace run_successive_rejects(const Scm& scm, const PolicyConfig& config);

PolicyTrace run_policy(const Scm& scm, const PolicyConfig& config);

}  // namespace cbandit
