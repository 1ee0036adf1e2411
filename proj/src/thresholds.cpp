#include "cbandit/thresholds.hpp"

#include "cbandit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbandit {

double estimate_q_hat(const ObsLog& log, std::span<const std::size_t> records, const Admg& g, NodeId i, int x,
                      const NodeSet& stratify_by) {
    if (records.empty()) return 0.0;
    std::vector<std::size_t> stride(stratify_by.size());
    std::size_t codes = 1;
    for (std::size_t k = stratify_by.size(); k-- > 0;) {
        stride[k] = codes;
        codes *= static_cast<std::size_t>(g.domain_size(stratify_by[k]));
        if (codes > (std::size_t{1} << 20))
            throw Error(ErrorKind::StateSpaceTooLarge, "too many strata for q-hat of '" + g.name(i) + "'");
    }
    std::vector<std::size_t> counts(codes, 0);
    for (std::size_t r : records) {
        if (log.value(r, i) != x) continue;
        std::size_t c = 0;
        for (std::size_t k = 0; k < stratify_by.size(); ++k)
            c += stride[k] * static_cast<std::size_t>(log.value(r, stratify_by[k]));
        ++counts[c];
    }
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (std::size_t c : counts) m = std::min(m, c);
    return static_cast<double>(m) / static_cast<double>(records.size());
}

std::size_t n_of_q(const FrequencyProfile& profile) {
    double total = 0.0;
    for (const auto& e : profile) total += e.cost;
    const auto limit = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total)));
    for (std::size_t tau = 1; tau <= limit; ++tau) {
        double weighted = 0.0;
        for (const auto& e : profile) {
            const double threshold = std::pow(1.0 / static_cast<double>(tau), 1.0 / static_cast<double>(e.k));
            if (e.q < threshold) weighted += e.cost;
        }
        if (weighted <= static_cast<double>(tau)) return tau;
    }
    return limit;
}

std::size_t m_prime(const FrequencyProfile& profile) {
    const std::size_t limit = std::max<std::size_t>(1, profile.size());
    for (std::size_t tau = 1; tau <= limit; ++tau) {
        std::size_t count = 0;
        for (const auto& e : profile)
            if (e.q < 1.0 / static_cast<double>(tau)) ++count;
        if (count <= tau) return tau;
    }
    return limit;
}

std::vector<std::size_t> infrequent_arms(const FrequencyProfile& profile, std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const auto& e = profile[k];
        if (std::pow(e.q, static_cast<double>(e.k)) <= 1.0 / static_cast<double>(n)) out.push_back(k);
    }
    return out;
}

}  // namespace cbandit
