#pragma once

#include "cbandit/admg.hpp"
#include "cbandit/arms.hpp"
#include "cbandit/obs_log.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cbandit {

/// One interventional arm's entry in a frequency profile.
struct FrequencyEntry {
    ArmIndex arm = 0;
    double q = 0.0;
    std::size_t k = 1;  // c-component size of the intervened node
    double cost = 1.0;
};

using FrequencyProfile = std::vector<FrequencyEntry>;

/// min over realizations z of the stratifying set of
/// #{records: X_i = x, stratum = z}, divided by the number of records.
/// `stratify_by` is widetilde_pa(X_i); pass an empty set for the
/// unstratified no-backdoor variant. `records` are indices into `log`.
double estimate_q_hat(const ObsLog& log, std::span<const std::size_t> records, const Admg& g, NodeId i, int x,
                      const NodeSet& stratify_by);

/// Smallest integer tau in [1, ceil(sum c)] with
/// sum_a c_a 1{q_a < (1/tau)^{1/k_a}} <= tau.
std::size_t n_of_q(const FrequencyProfile& profile);

/// Smallest integer tau >= 1 with sum_a 1{q_a < 1/tau} <= tau.
std::size_t m_prime(const FrequencyProfile& profile);

/// Indices into `profile` with q^k <= 1/n.
std::vector<std::size_t> infrequent_arms(const FrequencyProfile& profile, std::size_t n);

}  // namespace cbandit
