#pragma once

#include "cbandit/admg.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cbandit {

/// a_0 (observe) or a_{i,x} (do(X_i = x)).
struct Arm {
    bool observe = true;
    NodeId node = 0;
    int value = 0;

    static Arm observation() { return {}; }
    static Arm intervene(NodeId i, int x) { return {false, i, x}; }
    bool operator==(const Arm&) const = default;
};

using ArmIndex = std::size_t;

/// Arm 0 is a_0; then (i, x) for each intervenable i in id order, x ascending.
class ArmSet {
public:
    ArmSet() = default;
    explicit ArmSet(const Admg& g);

    std::size_t size() const noexcept { return arms_.size(); }
    const Arm& operator[](ArmIndex k) const { return arms_[k]; }
    /// Throws Error(InvalidArm) when out of range.
    const Arm& at(ArmIndex k) const;
    const std::vector<Arm>& all() const noexcept { return arms_; }

    /// Throws Error(InvalidArm) if (i, x) is not an arm of this set.
    ArmIndex index_of(NodeId i, int x) const;
    ArmIndex index_of(const Arm& arm) const;

    /// "a0" or "<name>=<x>".
    std::string label(ArmIndex k) const;
    /// Inverse of label(); throws Error(InvalidArm).
    ArmIndex parse_label(const std::string& label) const;

private:
    std::vector<Arm> arms_;
    std::vector<std::string> names_;
    std::vector<ArmIndex> first_;  // per node: index of (node, 0), or 0 if not intervenable
};

/// Cost per arm index; entry 0 (a_0) is always 1.
using CostSet = std::vector<double>;

CostSet uniform_costs(const ArmSet& arms, double c);

/// Throws Error(ModelInvalid) unless sizes match, all costs > 0 and c_0 == 1.
void validate_costs(const ArmSet& arms, const CostSet& costs);

bool all_integer(const CostSet& costs);

}  // namespace cbandit
