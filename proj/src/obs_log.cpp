#include "cbandit/obs_log.hpp"

#include "cbandit/error.hpp"

#include <cmath>

namespace cbandit {

ObsLog::ObsLog(std::size_t num_nodes, std::size_t num_arms)
    : num_nodes_(num_nodes), by_arm_(num_arms), counts_(num_arms, 0), reward_sums_(num_arms, 0) {}

void ObsLog::add(ArmIndex arm, const Assignment& values, int reward) {
    if (arm >= counts_.size()) throw Error(ErrorKind::InvalidArm, "arm index out of range");
    if (values.size() != num_nodes_) throw Error(ErrorKind::ModelInvalid, "assignment has the wrong size");
    by_arm_[arm].push_back(arms_.size());
    arms_.push_back(arm);
    rewards_.push_back(reward);
    values_.insert(values_.end(), values.begin(), values.end());
    ++counts_[arm];
    reward_sums_[arm] += reward == 1 ? 1 : 0;
}

double update_mu0(const ObsLog& log) {
    if (log.count(0) == 0) throw Error(ErrorKind::NoObservations, "no a0 records");
    return static_cast<double>(log.reward_sum(0)) / static_cast<double>(log.count(0));
}

double pooled_estimate(std::size_t reward_sum, std::size_t n, double slice_sum, std::size_t s) {
    if (n + s == 0) throw Error(ErrorKind::NoEffectiveSamples, "N + S is zero");
    return (static_cast<double>(reward_sum) + slice_sum) / static_cast<double>(n + s);
}

double ucb_index(double mu_hat, double n, double t) {
    if (!(n > 0.0)) throw Error(ErrorKind::ZeroCount, "UCB needs a positive count");
    if (!(t >= 1.0)) throw Error(ErrorKind::ZeroCount, "UCB needs t >= 1");
    return mu_hat + std::sqrt(2.0 * std::log(t) / n);
}

}  // namespace cbandit
