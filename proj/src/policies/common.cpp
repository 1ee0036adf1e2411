#include "common.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbandit {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::CumulativeUcb: return "cumulative_ucb";
        case PolicyKind::UniformCostCausalUcb: return "uniform_cost_causal_ucb";
        case PolicyKind::BudgetedKube: return "budgeted_kube";
        case PolicyKind::SimpleBudgeted: return "simple_budgeted";
        case PolicyKind::SimpleNoBackdoor: return "simple_nobackdoor";
        case PolicyKind::GammaNb: return "gamma_nb";
        case PolicyKind::SuccessiveRejects: return "successive_rejects";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
    for (auto k : {PolicyKind::CumulativeUcb, PolicyKind::UniformCostCausalUcb, PolicyKind::BudgetedKube,
                   PolicyKind::SimpleBudgeted, PolicyKind::SimpleNoBackdoor, PolicyKind::GammaNb,
                   PolicyKind::SuccessiveRejects})
        if (to_string(k) == name) return k;
    throw Error(ErrorKind::ConfigInvalid, "unknown policy '" + std::string(name) + "'");
}

bool is_cumulative(PolicyKind kind) {
    return kind == PolicyKind::CumulativeUcb || kind == PolicyKind::UniformCostCausalUcb ||
           kind == PolicyKind::BudgetedKube;
}

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Init: return "init";
        case Phase::Observe: return "observe";
        case Phase::Exploit: return "exploit";
        case Phase::Explore: return "explore";
        case Phase::ExploreExtra: return "explore-extra";
        case Phase::Reject: return "reject";
    }
    return "unknown";
}

double PolicyTrace::total_cost() const {
    double sum = 0.0;
    for (const auto& r : rounds) sum += r.cost;
    return sum;
}

PolicyTrace run_policy(const Scm& scm, const PolicyConfig& config) {
    switch (config.kind) {
        case PolicyKind::CumulativeUcb: return run_cumulative_ucb(scm, config);
        case PolicyKind::UniformCostCausalUcb: return run_uniform_cost_causal_ucb(scm, config);
        case PolicyKind::BudgetedKube: return run_budgeted_kube(scm, config);
        case PolicyKind::SimpleBudgeted: return run_simple_budgeted(scm, config);
        case PolicyKind::SimpleNoBackdoor: return run_simple_nobackdoor(scm, config);
        case PolicyKind::GammaNb: return run_gamma_nb(scm, config);
        case PolicyKind::SuccessiveRejects: return run_successive_rejects(scm, config);
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown policy kind");
}

namespace detail {

Bandit::Bandit(const Scm& scm, const PolicyConfig& config)
    : scm_(&scm),
      costs_(config.costs),
      rng_(derive_seed(config.seed, {kStreamSamples})),
      log_(scm.graph().num_nodes(), scm.arms().size()),
      remaining_(config.budget) {
    trace_.policy = config.kind;
    trace_.budget = config.budget;
    trace_.seed = config.seed;
}

int Bandit::pull(ArmIndex arm, Phase phase, double beta) {
    const std::size_t n0 = log_.count(0);
    const int reward = scm_->sample(arm, rng_, buffer_);
    log_.add(arm, buffer_, reward);
    remaining_ -= costs_[arm];
    if (std::abs(remaining_) < kCostSlack) remaining_ = 0.0;
    Round r;
    r.t = trace_.rounds.size() + 1;
    r.arm = arm;
    r.cost = costs_[arm];
    r.reward = reward;
    r.budget_remaining = remaining_;
    r.phase = phase;
    r.beta = beta;
    r.n0_before = n0;
    trace_.rounds.push_back(r);
    return reward;
}

double min_interventional_cost(const CostSet& costs) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t a = 1; a < costs.size(); ++a) m = std::min(m, costs[a]);
    return m;
}

void check_config(const Scm& scm, const PolicyConfig& config) {
    validate_costs(scm.arms(), config.costs);
    if (!std::isfinite(config.budget) || config.budget < 0.0)
        throw Error(ErrorKind::InsufficientBudget, "budget must be a finite non-negative number");
}

}  // namespace detail
}  // namespace cbandit
