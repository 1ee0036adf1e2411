#include "cbandit/arms.hpp"

#include "cbandit/error.hpp"

#include <charconv>
#include <cmath>

namespace cbandit {

ArmSet::ArmSet(const Admg& g) : first_(g.num_nodes(), 0) {
    arms_.push_back(Arm::observation());
    for (NodeId v = 0; v < g.num_nodes(); ++v) names_.push_back(g.name(v));
    for (NodeId i : g.intervenable()) {
        first_[i] = arms_.size();
        for (int x = 0; x < g.domain_size(i); ++x) arms_.push_back(Arm::intervene(i, x));
    }
}

const Arm& ArmSet::at(ArmIndex k) const {
    if (k >= arms_.size()) throw Error(ErrorKind::InvalidArm, "arm index " + std::to_string(k) + " out of range");
    return arms_[k];
}

ArmIndex ArmSet::index_of(NodeId i, int x) const {
    if (i < first_.size() && first_[i] != 0 && x >= 0) {
        ArmIndex k = first_[i] + static_cast<ArmIndex>(x);
        if (k < arms_.size() && !arms_[k].observe && arms_[k].node == i) return k;
    }
    throw Error(ErrorKind::InvalidArm, "no arm do(" + (i < names_.size() ? names_[i] : std::to_string(i)) + "=" +
                                           std::to_string(x) + ")");
}

ArmIndex ArmSet::index_of(const Arm& arm) const { return arm.observe ? 0 : index_of(arm.node, arm.value); }

std::string ArmSet::label(ArmIndex k) const {
    const Arm& a = arms_.at(k);
    if (a.observe) return "a0";
    return names_[a.node] + "=" + std::to_string(a.value);
}

ArmIndex ArmSet::parse_label(const std::string& label) const {
    if (label == "a0") return 0;
    auto eq = label.rfind('=');
    if (eq != std::string::npos) {
        std::string name = label.substr(0, eq);
        int x = 0;
        auto [ptr, ec] = std::from_chars(label.data() + eq + 1, label.data() + label.size(), x);
        if (ec == std::errc{} && ptr == label.data() + label.size()) {
            for (NodeId v = 0; v < names_.size(); ++v)
                if (names_[v] == name) return index_of(v, x);
        }
    }
    throw Error(ErrorKind::InvalidArm, "unknown arm '" + label + "'");
}

CostSet uniform_costs(const ArmSet& arms, double c) {
    CostSet costs(arms.size(), c);
    costs[0] = 1.0;
    return costs;
}

void validate_costs(const ArmSet& arms, const CostSet& costs) {
    if (costs.size() != arms.size())
        throw Error(ErrorKind::ModelInvalid, "cost set has " + std::to_string(costs.size()) + " entries, expected " +
                                                 std::to_string(arms.size()));
    if (costs[0] != 1.0) throw Error(ErrorKind::ModelInvalid, "cost of a0 must be 1");
    for (double c : costs)
        if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::ModelInvalid, "arm costs must be positive");
}

bool all_integer(const CostSet& costs) {
    for (double c : costs)
        if (c != std::floor(c)) return false;
    return true;
}

}  // namespace cbandit
