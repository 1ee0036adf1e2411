#pragma once

#include "cbandit/arms.hpp"
#include "cbandit/scm.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cbandit {

/// Every pulled round in order: arm, full observed assignment, reward.
/// Round t (1-based) is record t-1.
class ObsLog {
public:
    ObsLog(std::size_t num_nodes, std::size_t num_arms);

    void add(ArmIndex arm, const Assignment& values, int reward);

    std::size_t size() const noexcept { return arms_.size(); }
    std::size_t num_nodes() const noexcept { return num_nodes_; }
    std::size_t num_arms() const noexcept { return counts_.size(); }

    ArmIndex arm(std::size_t record) const { return arms_[record]; }
    int reward(std::size_t record) const { return rewards_[record]; }
    std::span<const int> values(std::size_t record) const {
        return {values_.data() + record * num_nodes_, num_nodes_};
    }
    int value(std::size_t record, NodeId v) const { return values_[record * num_nodes_ + v]; }

    /// Records of a_0 pulls, in arrival order (O^t).
    const std::vector<std::size_t>& observational() const noexcept { return by_arm_[0]; }
    /// Records of pulls of `arm`, in arrival order (I^t_{i,x} or O^t).
    const std::vector<std::size_t>& pulls(ArmIndex arm) const { return by_arm_.at(arm); }

    std::size_t count(ArmIndex arm) const { return counts_.at(arm); }
    std::size_t reward_sum(ArmIndex arm) const { return reward_sums_.at(arm); }

private:
    std::size_t num_nodes_;
    std::vector<ArmIndex> arms_;
    std::vector<int> rewards_;
    std::vector<int> values_;
    std::vector<std::vector<std::size_t>> by_arm_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> reward_sums_;
};

/// Mean reward over the a_0 records. Throws Error(NoObservations).
double update_mu0(const ObsLog& log);

/// (interventional reward sum + sum of slice estimates) / (N + S).
/// Throws Error(NoEffectiveSamples) when N + S == 0.
double pooled_estimate(std::size_t reward_sum, std::size_t n, double slice_sum, std::size_t s);

/// mu_hat + sqrt(2 ln t / n). Throws Error(ZeroCount) for n == 0 or t < 1.
double ucb_index(double mu_hat, double n, double t);

}  // namespace cbandit
