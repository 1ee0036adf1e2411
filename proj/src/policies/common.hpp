#pragma once

#include "cbandit/obs_log.hpp"
#include "cbandit/policies.hpp"
#include "cbandit/rng.hpp"

#include <cstdint>

namespace cbandit::detail {

inline constexpr std::uint64_t kStreamSamples = 1;
inline constexpr std::uint64_t kStreamStrata = 2;

/// Shared protocol state: sample stream, log, budget and trace.
class Bandit {
public:
    Bandit(const Scm& scm, const PolicyConfig& config);

    const Scm& scm() const noexcept { return *scm_; }
    const CostSet& costs() const noexcept { return costs_; }
    const ObsLog& log() const noexcept { return log_; }
    PolicyTrace& trace() noexcept { return trace_; }
    double budget_remaining() const noexcept { return remaining_; }
    std::size_t rounds() const noexcept { return trace_.rounds.size(); }
    bool affordable(ArmIndex arm) const { return costs_[arm] <= remaining_ + kCostSlack; }

    /// Samples, logs and charges one pull; returns the reward.
    int pull(ArmIndex arm, Phase phase, double beta = 0.0);

    PolicyTrace finish() { return std::move(trace_); }

    static constexpr double kCostSlack = 1e-9;

private:
    const Scm* scm_;
    CostSet costs_;
    Rng rng_;
    ObsLog log_;
    Assignment buffer_;
    double remaining_;
    PolicyTrace trace_;
};

double min_interventional_cost(const CostSet& costs);

/// Throws Error(ModelInvalid) / Error(InsufficientBudget) on bad inputs.
void check_config(const Scm& scm, const PolicyConfig& config);

}  // namespace cbandit::detail
