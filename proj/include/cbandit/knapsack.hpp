#pragma once

#include "cbandit/arms.hpp"

#include <cstdint>
#include <vector>

namespace cbandit {

/// R*(B): max sum n_a mu_a subject to sum n_a c_a <= B over non-negative
/// integer counts (unbounded knapsack). Throws Error(NonIntegerCosts).
double optimal_value(const std::vector<double>& means, const CostSet& costs, std::int64_t budget);

/// R*(b) for every b in [0, budget].
std::vector<double> optimal_value_table(const std::vector<double>& means, const CostSet& costs, std::int64_t budget);

/// Pull counts attaining optimal_value, lowest arm index preferred on ties.
std::vector<std::int64_t> optimal_counts(const std::vector<double>& means, const CostSet& costs, std::int64_t budget);

/// argmax mu_a / c_a, lowest index on ties.
ArmIndex best_ratio_arm(const std::vector<double>& means, const CostSet& costs);

/// delta_a = mu_{a*}/c_{a*} - mu_a/c_a with a* = best_ratio_arm.
std::vector<double> ratio_gaps(const std::vector<double>& means, const CostSet& costs);

}  // namespace cbandit
