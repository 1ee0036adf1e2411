#include "common.hpp"

#include "cbandit/error.hpp"
#include "cbandit/strata.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace cbandit {

namespace {

using detail::Bandit;

PolicyTrace run_causal_ucb(const Scm& scm, const PolicyConfig& config, bool unit_index_costs) {
    detail::check_config(scm, config);
    const ArmSet& arms = scm.arms();
    const std::size_t k = arms.size();
    const double init_cost = std::accumulate(config.costs.begin(), config.costs.end(), 0.0);
    if (config.budget + Bandit::kCostSlack < init_cost)
        throw Error(ErrorKind::InsufficientBudget, "budget " + std::to_string(config.budget) +
                                                       " cannot pull every arm once (needs " +
                                                       std::to_string(init_cost) + ")");

    FactorizedModel model(scm.graph());
    StrataEngine engine(model, derive_seed(config.seed, {detail::kStreamStrata}));
    Bandit bandit(scm, config);
    const ObsLog& log = bandit.log();
    for (NodeId i : scm.graph().intervenable())
        if (!identifiable_sufficient(scm.graph(), i))
            bandit.trace().warnings.push_back("'" + scm.graph().name(i) +
                                              "' fails the identifiability condition; its arms use interventional "
                                              "samples only");

    const CostSet index_costs = unit_index_costs ? CostSet(k, 1.0) : config.costs;
    std::vector<double> mu(k, 0.0);
    std::vector<double> n_eff(k, 0.0);
    auto refresh = [&](ArmIndex a) {
        if (a == 0) {
            mu[0] = update_mu0(log);
            n_eff[0] = static_cast<double>(log.count(0));
            return;
        }
        const std::size_t s = engine.s(a);
        n_eff[a] = static_cast<double>(log.count(a) + s);
        if (n_eff[a] > 0.0) mu[a] = pooled_estimate(log.reward_sum(a), log.count(a), engine.slice_sum(a), s);
    };
    auto after_pull = [&](ArmIndex a) {
        if (a == 0) {
            engine.observe(log, log.size() - 1);
            for (ArmIndex b = 0; b < k; ++b) refresh(b);
        } else {
            refresh(a);
        }
    };

    for (ArmIndex a = 0; a < k; ++a) {
        bandit.pull(a, Phase::Init);
        after_pull(a);
    }

    const double min_cost = detail::min_interventional_cost(config.costs);
    double beta = 1.0;
    std::size_t t = k + 1;
    while (bandit.budget_remaining() >= 1.0 - Bandit::kCostSlack) {
        const double n0 = static_cast<double>(log.count(0));
        const double log_t = std::log(static_cast<double>(t));
        ArmIndex choice = 0;
        Phase phase = Phase::Observe;
        if (!(n0 < beta * beta * log_t || bandit.budget_remaining() < min_cost)) {
            phase = Phase::Exploit;
            const double log_prev = std::log(static_cast<double>(t - 1));
            double best = -std::numeric_limits<double>::infinity();
            for (ArmIndex a = 0; a < k; ++a) {
                if (!bandit.affordable(a)) continue;
                double index = mu[a] + std::sqrt(2.0 * log_prev / n_eff[a]);
                if (config.cost_normalized_index || unit_index_costs) index /= index_costs[a];
                if (index > best) {
                    best = index;
                    choice = a;
                }
            }
        }
        bandit.pull(choice, phase, beta);
        after_pull(choice);

        ArmIndex tilde = 0;
        for (ArmIndex a = 1; a < k; ++a)
            if (mu[a] / index_costs[a] > mu[tilde] / index_costs[tilde]) tilde = a;
        const double ratio = mu[tilde] / index_costs[tilde];
        if (mu[0] < ratio) beta = std::min(2.0 * std::sqrt(2.0) / (ratio - mu[0]), std::sqrt(log_t));

        if (config.snapshot_interval > 0 && t % config.snapshot_interval == 0) {
            Snapshot snap;
            snap.t = t;
            snap.mu_hat = mu;
            for (ArmIndex a = 0; a < k; ++a) {
                snap.ucb.push_back(mu[a] + std::sqrt(2.0 * log_t / n_eff[a]));
                snap.n.push_back(log.count(a));
                snap.s.push_back(a == 0 ? 0 : engine.s(a));
            }
            bandit.trace().snapshots.push_back(std::move(snap));
        }
        ++t;
    }
    bandit.trace().final_estimates = mu;
    return bandit.finish();
}

}  // namespace

PolicyTrace run_cumulative_ucb(const Scm& scm, const PolicyConfig& config) { return run_causal_ucb(scm, config, false); }

PolicyTrace run_uniform_cost_causal_ucb(const Scm& scm, const PolicyConfig& config) {
    if (!scm.graph().bidirected_edges().empty())
        throw Error(ErrorKind::GraphHasHiddenConfounders, "uniform-cost causal UCB needs a graph without bidirected edges");
    return run_causal_ucb(scm, config, true);
}

}  // namespace cbandit
