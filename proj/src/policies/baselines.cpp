#include "common.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cbandit {

using detail::Bandit;

PolicyTrace run_budgeted_kube(const Scm& scm, const PolicyConfig& config) {
    detail::check_config(scm, config);
    const std::size_t k = scm.arms().size();
    const double init_cost = std::accumulate(config.costs.begin(), config.costs.end(), 0.0);
    if (config.budget + Bandit::kCostSlack < init_cost)
        throw Error(ErrorKind::InsufficientBudget, "budget cannot pull every arm once");

    Bandit bandit(scm, config);
    const ObsLog& log = bandit.log();
    for (ArmIndex a = 0; a < k; ++a) bandit.pull(a, Phase::Init);
    while (true) {
        const double log_t = std::log(static_cast<double>(bandit.rounds()));
        ArmIndex choice = k;
        double best = -std::numeric_limits<double>::infinity();
        for (ArmIndex a = 0; a < k; ++a) {
            if (!bandit.affordable(a)) continue;
            const auto n = static_cast<double>(log.count(a));
            const double mean = static_cast<double>(log.reward_sum(a)) / n;
            const double index = (mean + std::sqrt(2.0 * log_t / n)) / config.costs[a];
            if (index > best) {
                best = index;
                choice = a;
            }
        }
        if (choice == k) break;
        bandit.pull(choice, Phase::Exploit);
    }
    std::vector<double> mu(k);
    for (ArmIndex a = 0; a < k; ++a)
        mu[a] = static_cast<double>(log.reward_sum(a)) / static_cast<double>(log.count(a));
    bandit.trace().final_estimates = mu;
    return bandit.finish();
}

PolicyTrace run_successive_rejects(const Scm& scm, const PolicyConfig& config) {
    detail::check_config(scm, config);
    const std::size_t k = scm.arms().size();
    if (k < 2) throw Error(ErrorKind::InsufficientBudget, "successive rejects needs at least two arms");
    const double total_cost = std::accumulate(config.costs.begin(), config.costs.end(), 0.0);
    if (config.budget + Bandit::kCostSlack < total_cost)
        throw Error(ErrorKind::InsufficientBudget, "budget cannot pull every arm once");

    const double mean_cost = total_cost / static_cast<double>(k);
    const double horizon = std::floor(config.budget / mean_cost + Bandit::kCostSlack);
    double log_bar = 0.5;
    for (std::size_t i = 2; i <= k; ++i) log_bar += 1.0 / static_cast<double>(i);
    auto phase_length = [&](std::size_t phase) -> std::size_t {
        const double raw = std::ceil((horizon - static_cast<double>(k)) / (log_bar * static_cast<double>(k + 1 - phase)));
        return std::max<std::size_t>(1, raw > 0 ? static_cast<std::size_t>(raw) : 0);
    };

    Bandit bandit(scm, config);
    const ObsLog& log = bandit.log();
    auto mean = [&](ArmIndex a) {
        return log.count(a) ? static_cast<double>(log.reward_sum(a)) / static_cast<double>(log.count(a)) : 0.0;
    };
    std::vector<ArmIndex> alive(k);
    std::iota(alive.begin(), alive.end(), 0);
    std::size_t previous = 0;
    for (std::size_t phase = 1; phase < k; ++phase) {
        const std::size_t target = std::max(previous, phase_length(phase));
        for (ArmIndex a : alive)
            while (log.count(a) < target && bandit.affordable(a)) bandit.pull(a, Phase::Explore);
        previous = target;
        // reject the lowest empirical mean; the highest index goes on ties
        auto worst = alive.begin();
        for (auto it = alive.begin(); it != alive.end(); ++it)
            if (mean(*it) <= mean(*worst)) worst = it;
        alive.erase(worst);
    }
    std::vector<double> mu(k);
    for (ArmIndex a = 0; a < k; ++a) mu[a] = mean(a);
    bandit.trace().final_estimates = mu;
    bandit.trace().chosen = alive.front();
    return bandit.finish();
}

}  // namespace cbandit
