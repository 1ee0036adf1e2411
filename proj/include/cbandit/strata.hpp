#pragma once

#include "cbandit/admg.hpp"
#include "cbandit/arms.hpp"
#include "cbandit/obs_log.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbandit {

inline constexpr std::size_t kMaxFactorTerms = std::size_t{1} << 20;

/// Conditioning sets Z_j (factorization_parents) and, per interventional
/// arm, the enumeration of the truncated factorization: every realization
/// w' of V \ {X_i} with Y = 1 combined with every x'.
class FactorizedModel {
public:
    /// Throws Error(StateSpaceTooLarge) when an arm needs more than
    /// kMaxFactorTerms terms.
    explicit FactorizedModel(const Admg& g);

    struct ArmPlan {
        NodeId node = 0;
        int value = 0;
        bool identifiable = true;
        std::vector<bool> in_component;         // per node: V_j in C_i
        std::vector<std::vector<bool>> required;  // [j][code]: bucket enters the minima
        std::size_t num_terms = 0;
        // terms x |V| offsets into a flat per-slice probability table
        std::vector<std::uint32_t> slots;
    };

    const Admg& graph() const noexcept { return graph_; }
    const ArmSet& arms() const noexcept { return arms_; }
    std::size_t num_nodes() const noexcept { return z_.size(); }
    const NodeSet& z(NodeId j) const { return z_.at(j); }
    std::size_t num_codes(NodeId j) const { return num_codes_.at(j); }
    /// Mixed-radix code of values restricted to Z_j (first member most significant).
    std::size_t code(NodeId j, std::span<const int> values) const;
    /// Offset of node j's (code, value) block in the flat probability table.
    std::size_t table_offset(NodeId j) const { return offsets_.at(j); }
    std::size_t table_size() const noexcept { return offsets_.back(); }

    /// Plan for an interventional arm index (>= 1).
    const ArmPlan& plan(ArmIndex arm) const { return plans_.at(arm); }

private:
    Admg graph_;
    ArmSet arms_;
    std::vector<NodeSet> z_;
    std::vector<std::vector<std::size_t>> strides_;
    std::vector<std::size_t> num_codes_;
    std::vector<std::size_t> offsets_;  // size |V| + 1
    std::vector<ArmPlan> plans_;        // index 0 unused
};

/// Assigns the r-th a_0 record (0-based arrival rank) to one of |V|
/// partitions: consecutive blocks of |V| ranks are spread by a seeded
/// permutation, so sizes never differ by more than one.
class ObsPartitioner {
public:
    ObsPartitioner(std::size_t num_partitions, std::uint64_t seed);
    std::size_t partition(std::size_t rank);

private:
    std::size_t parts_;
    std::uint64_t seed_;
    std::vector<std::uint32_t> cache_;  // permutations of completed blocks, flattened
};

/// Per-slice counts for one arm.
struct SliceCounts {
    std::vector<std::uint32_t> value_counts;  // flat, FactorizedModel::table_offset layout
    std::vector<std::vector<std::uint32_t>> code_counts;  // [j][code]
};

/// Result of partitioning O^t for one target arm.
struct StrataIndex {
    std::vector<std::size_t> partition_sizes;  // |O^t_j|
    std::vector<std::size_t> node_minimum;     // S_{j,i} for V_j in C_i, else S~_{j,i,x}
    std::size_t s = 0;                         // S_{i,x}
    std::vector<SliceCounts> slices;
};

/// From-scratch strata for `arm` over the a_0 records of `log`. Arms that
/// fail identifiable_sufficient get S = 0.
StrataIndex build_strata(const ObsLog& log, const FactorizedModel& model, ArmIndex arm, std::uint64_t seed);

/// Y^s for slice s. Throws Error(EmptySlice) if s >= S or a required
/// bucket of the slice is empty.
double factorized_stratum_estimate(const StrataIndex& strata, const FactorizedModel& model, ArmIndex arm,
                                   std::size_t s);

/// Incremental maintenance of every arm's S and sum of Y^s as a_0 records
/// arrive. Agrees exactly with build_strata on the same log and seed.
class StrataEngine {
public:
    StrataEngine(const FactorizedModel& model, std::uint64_t seed);

    /// `record` must be the next a_0 record of `log`.
    void observe(const ObsLog& log, std::size_t record);

    std::size_t s(ArmIndex arm) const { return arms_.at(arm).s; }
    double slice_sum(ArmIndex arm) const { return arms_.at(arm).sum; }
    const std::vector<double>& slice_values(ArmIndex arm) const { return arms_.at(arm).y; }
    std::size_t num_observations() const noexcept { return ranks_; }

private:
    struct ArmState {
        std::size_t s = 0;
        std::vector<SliceCounts> slices;
        std::vector<double> y;
        double sum = 0.0;
    };

    void rebuild(ArmIndex arm, const ObsLog& log);
    std::size_t current_minimum(ArmIndex arm) const;

    const FactorizedModel* model_;
    ObsPartitioner partitioner_;
    std::size_t ranks_ = 0;
    std::vector<std::vector<std::vector<std::size_t>>> buckets_;  // [j][code] -> records
    std::vector<ArmState> arms_;
};

}  // namespace cbandit
