#pragma once

#include "cbandit/arms.hpp"
#include "cbandit/policies.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace cbandit {

/// Text form of a trace:
///
///   # config_hash=<16 hex digits> seed=<n> policy=<name> budget=<B>
///   t,arm,cost,reward,budget_remaining
///   1,a0,1,0,99
///   ...
///   # chosen=X1=1                     (simple-regret policies)
///
/// Snapshots and warnings follow as further `#` lines.
std::string serialize_trace(const PolicyTrace& trace, const ArmSet& arms, std::uint64_t config_hash);

struct ParsedTrace {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string policy;
    double budget = 0.0;
    std::vector<Round> rounds;  // phase, beta and n0 are not serialized
    std::optional<ArmIndex> chosen;
};

/// Throws ParseError.
ParsedTrace parse_trace(std::string_view text, const ArmSet& arms);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace cbandit
