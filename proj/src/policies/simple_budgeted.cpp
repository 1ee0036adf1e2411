#include "common.hpp"

#include "cbandit/bayes_net.hpp"
#include "cbandit/error.hpp"
#include "cbandit/strata.hpp"
#include "cbandit/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace cbandit {

namespace {

using detail::Bandit;

enum class Variant { General, NoBackdoor, GammaNb };

ArmIndex argmax(const std::vector<double>& v) {
    ArmIndex best = 0;
    for (ArmIndex a = 1; a < v.size(); ++a)
        if (v[a] > v[best]) best = a;
    return best;
}

double conditional_frequency(const ObsLog& log, std::span<const std::size_t> records, NodeId i, int x) {
    std::size_t hits = 0;
    std::size_t ones = 0;
    for (std::size_t r : records) {
        if (log.value(r, i) != x) continue;
        ++hits;
        ones += log.reward(r) == 1 ? 1 : 0;
    }
    return hits ? static_cast<double>(ones) / static_cast<double>(hits) : 0.5;
}

// First-phase style estimates for every interventional arm from a_0 records.
void estimate_from_observations(const Scm& scm, const PolicyConfig& config, Variant variant, const ObsLog& log,
                                std::vector<double>& mu) {
    const auto& records = log.observational();
    const ArmSet& arms = scm.arms();
    const Admg& g = scm.graph();
    if (variant != Variant::General) {
        for (ArmIndex a = 1; a < arms.size(); ++a) mu[a] = conditional_frequency(log, records, arms[a].node, arms[a].value);
        return;
    }
    if (config.estimator == EstimatorPath::Factorized) {
        FactorizedModel model(g);
        const std::uint64_t seed = derive_seed(config.seed, {detail::kStreamStrata, records.size()});
        for (ArmIndex a = 1; a < arms.size(); ++a) {
            StrataIndex strata = build_strata(log, model, a, seed);
            if (strata.s == 0) {
                mu[a] = 0.5;
                continue;
            }
            double sum = 0.0;
            for (std::size_t s = 0; s < strata.s; ++s) sum += factorized_stratum_estimate(strata, model, a, s);
            mu[a] = sum / static_cast<double>(strata.s);
        }
        return;
    }
    const std::size_t threshold = config.smoothing_threshold.value_or(default_smoothing_threshold(records.size()));
    std::vector<std::optional<ReducedGraph>> reduced(g.num_nodes());
    for (ArmIndex a = 1; a < arms.size(); ++a) {
        const NodeId i = arms[a].node;
        if (!reduced[i]) reduced[i] = reduce_to_h_i(g, i);
        mu[a] = mu_from_bayes_net(learn_bayes_net(log, records, *reduced[i], arms[a].value, threshold));
    }
}

PolicyTrace run_two_phase(const Scm& scm, const PolicyConfig& config, Variant variant) {
    detail::check_config(scm, config);
    const Admg& g = scm.graph();
    const ArmSet& arms = scm.arms();
    const std::size_t k = arms.size();
    if (config.budget + Bandit::kCostSlack < 2.0)
        throw Error(ErrorKind::InsufficientBudget, "simple-regret policies need a budget of at least 2");
    if (variant != Variant::General) {
        for (NodeId i : g.intervenable())
            if (has_unblocked_backdoor(g, i))
                throw Error(ErrorKind::GraphNotNoBackdoor, "'" + g.name(i) + "' has an unblocked backdoor path to the reward");
    }
    if (variant == Variant::GammaNb && !config.allow_nonuniform_costs) {
        for (ArmIndex a = 2; a < k; ++a)
            if (config.costs[a] != config.costs[1])
                throw Error(ErrorKind::NonUniformCost, "gamma-NB needs a uniform interventional cost");
    }

    Bandit bandit(scm, config);
    PolicyTrace& trace = bandit.trace();
    const ObsLog& log = bandit.log();

    const auto observe_rounds = static_cast<std::size_t>(std::floor(config.budget / 2.0 + Bandit::kCostSlack));
    for (std::size_t r = 0; r < observe_rounds; ++r) bandit.pull(0, Phase::Observe);
    trace.observation_cost = static_cast<double>(observe_rounds);

    std::vector<double> mu(k, 0.5);
    mu[0] = log.count(0) ? update_mu0(log) : 0.5;
    estimate_from_observations(scm, config, variant, log, mu);

    FrequencyProfile profile;
    const auto& records = log.observational();
    for (ArmIndex a = 1; a < k; ++a) {
        const NodeId i = arms[a].node;
        FrequencyEntry e;
        e.arm = a;
        e.cost = config.costs[a];
        if (variant == Variant::General) {
            e.k = c_component_of(g, i).size();
            if (identifiable_sufficient(g, i)) {
                e.q = estimate_q_hat(log, records, g, i, arms[a].value, effective_parents(g, i));
            } else {
                e.q = 0.0;
                if (arms[a].value == 0)
                    trace.warnings.push_back("'" + g.name(i) +
                                             "' fails the identifiability condition; its arms are always explored");
            }
        } else {
            e.k = 1;
            e.q = estimate_q_hat(log, records, g, i, arms[a].value, {});
        }
        profile.push_back(e);
    }

    std::vector<ArmIndex> infrequent;
    if (variant == Variant::GammaNb) {
        const double threshold = 1.0 / static_cast<double>(m_prime(profile));
        for (const auto& e : profile)
            if (e.q < threshold) infrequent.push_back(e.arm);
    } else {
        for (std::size_t idx : infrequent_arms(profile, n_of_q(profile))) infrequent.push_back(profile[idx].arm);
    }
    trace.infrequent = infrequent;

    if (infrequent.empty()) {
        const auto more = static_cast<std::size_t>(std::floor(bandit.budget_remaining() + Bandit::kCostSlack));
        for (std::size_t r = 0; r < more; ++r) bandit.pull(0, Phase::Observe);
        trace.observation_cost += static_cast<double>(more);
        mu[0] = update_mu0(log);
        estimate_from_observations(scm, config, variant, log, mu);
    } else {
        double cost_sum = 0.0;
        for (ArmIndex a : infrequent) cost_sum += config.costs[a];
        const auto n = static_cast<std::size_t>(std::floor(config.budget / (2.0 * cost_sum) + Bandit::kCostSlack));
        trace.pulls_per_infrequent_arm = n;
        for (ArmIndex a : infrequent)
            for (std::size_t r = 0; r < n; ++r) bandit.pull(a, Phase::Explore);
        trace.exploration_cost = static_cast<double>(n) * cost_sum;

        std::vector<ArmIndex> by_cost = infrequent;
        std::stable_sort(by_cost.begin(), by_cost.end(),
                         [&](ArmIndex x, ArmIndex y) { return config.costs[x] < config.costs[y]; });
        bool pulled = true;
        while (pulled) {
            pulled = false;
            for (ArmIndex a : by_cost) {
                if (!bandit.affordable(a)) continue;
                bandit.pull(a, Phase::ExploreExtra);
                pulled = true;
            }
        }
        for (ArmIndex a : infrequent)
            if (log.count(a) > 0)
                mu[a] = static_cast<double>(log.reward_sum(a)) / static_cast<double>(log.count(a));
    }

    trace.final_estimates = mu;
    trace.chosen = argmax(mu);
    return bandit.finish();
}

}  // namespace

PolicyTrace run_simple_budgeted(const Scm& scm, const PolicyConfig& config) {
    return run_two_phase(scm, config, Variant::General);
}

PolicyTrace run_simple_nobackdoor(const Scm& scm, const PolicyConfig& config) {
    return run_two_phase(scm, config, Variant::NoBackdoor);
}

PolicyTrace run_gamma_nb(const Scm& scm, const PolicyConfig& config) {
    return run_two_phase(scm, config, Variant::GammaNb);
}

}  // namespace cbandit
