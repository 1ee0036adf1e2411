#include "cbandit/knapsack.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <cmath>

namespace cbandit {

namespace {

std::vector<std::int64_t> integer_costs(const std::vector<double>& means, const CostSet& costs) {
    if (means.size() != costs.size()) throw Error(ErrorKind::ModelInvalid, "means and costs differ in size");
    std::vector<std::int64_t> out;
    for (double c : costs) {
        if (!(c >= 1.0) || c != std::floor(c) || c > 1e12)
            throw Error(ErrorKind::NonIntegerCosts, "optimal value needs positive integer costs");
        out.push_back(static_cast<std::int64_t>(c));
    }
    return out;
}

}  // namespace

std::vector<double> optimal_value_table(const std::vector<double>& means, const CostSet& costs, std::int64_t budget) {
    auto c = integer_costs(means, costs);
    if (budget < 0) budget = 0;
    std::vector<double> dp(static_cast<std::size_t>(budget) + 1, 0.0);
    for (std::int64_t b = 1; b <= budget; ++b) {
        double best = dp[static_cast<std::size_t>(b - 1)];
        for (std::size_t a = 0; a < c.size(); ++a)
            if (c[a] <= b) best = std::max(best, dp[static_cast<std::size_t>(b - c[a])] + means[a]);
        dp[static_cast<std::size_t>(b)] = best;
    }
    return dp;
}

double optimal_value(const std::vector<double>& means, const CostSet& costs, std::int64_t budget) {
    return optimal_value_table(means, costs, budget).back();
}

std::vector<std::int64_t> optimal_counts(const std::vector<double>& means, const CostSet& costs, std::int64_t budget) {
    auto dp = optimal_value_table(means, costs, budget);
    auto c = integer_costs(means, costs);
    std::vector<std::int64_t> counts(means.size(), 0);
    std::int64_t b = budget < 0 ? 0 : budget;
    while (b > 0) {
        const double target = dp[static_cast<std::size_t>(b)];
        if (target == dp[static_cast<std::size_t>(b - 1)]) {
            --b;
            continue;
        }
        bool stepped = false;
        for (std::size_t a = 0; a < c.size() && !stepped; ++a) {
            if (c[a] <= b && dp[static_cast<std::size_t>(b - c[a])] + means[a] == target) {
                ++counts[a];
                b -= c[a];
                stepped = true;
            }
        }
        if (!stepped) --b;
    }
    return counts;
}

ArmIndex best_ratio_arm(const std::vector<double>& means, const CostSet& costs) {
    ArmIndex best = 0;
    for (ArmIndex a = 1; a < means.size(); ++a)
        if (means[a] / costs[a] > means[best] / costs[best]) best = a;
    return best;
}

std::vector<double> ratio_gaps(const std::vector<double>& means, const CostSet& costs) {
    ArmIndex star = best_ratio_arm(means, costs);
    const double r = means[star] / costs[star];
    std::vector<double> out(means.size());
    for (ArmIndex a = 0; a < means.size(); ++a) out[a] = a == star ? 0.0 : r - means[a] / costs[a];
    return out;
}

}  // namespace cbandit
