#include "cbandit/strata.hpp"

#include "cbandit/error.hpp"
#include "cbandit/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace cbandit {

FactorizedModel::FactorizedModel(const Admg& g) : graph_(g), arms_(g) {
    const std::size_t n = g.num_nodes();
    z_.resize(n);
    strides_.resize(n);
    num_codes_.resize(n);
    offsets_.assign(n + 1, 0);
    for (NodeId j = 0; j < n; ++j) {
        z_[j] = factorization_parents(g, j);
        const NodeSet& z = z_[j];
        std::vector<std::size_t> stride(z.size());
        std::size_t codes = 1;
        for (std::size_t k = z.size(); k-- > 0;) {
            stride[k] = codes;
            codes *= static_cast<std::size_t>(g.domain_size(z[k]));
            if (codes > kMaxFactorTerms)
                throw Error(ErrorKind::StateSpaceTooLarge, "conditioning set of '" + g.name(j) + "' is too large");
        }
        strides_[j] = std::move(stride);
        num_codes_[j] = codes;
        offsets_[j + 1] = offsets_[j] + codes * static_cast<std::size_t>(g.domain_size(j));
    }

    const NodeId y = g.reward();
    plans_.resize(arms_.size());
    for (ArmIndex a = 1; a < arms_.size(); ++a) {
        ArmPlan& plan = plans_[a];
        plan.node = arms_[a].node;
        plan.value = arms_[a].value;
        const NodeId i = plan.node;
        plan.identifiable = identifiable_sufficient(g, i);
        if (!plan.identifiable) continue;
        plan.in_component.assign(n, false);
        for (NodeId v : c_component_of(g, i)) plan.in_component[v] = true;
        plan.required.resize(n);
        for (NodeId j = 0; j < n; ++j) plan.required[j].assign(num_codes_[j], false);

        std::vector<NodeId> free_nodes;
        std::size_t terms = static_cast<std::size_t>(g.domain_size(i));
        for (NodeId v = 0; v < n; ++v) {
            if (v == i || v == y) continue;
            free_nodes.push_back(v);
            terms *= static_cast<std::size_t>(g.domain_size(v));
            if (terms > kMaxFactorTerms)
                throw Error(ErrorKind::StateSpaceTooLarge,
                            "factorized estimator for " + arms_.label(a) + " exceeds 2^20 terms");
        }
        plan.num_terms = terms;
        plan.slots.reserve(terms * n);

        Assignment w(n, 0);
        w[y] = 1;
        Assignment with_x;
        while (true) {
            with_x = w;
            with_x[i] = plan.value;
            for (int xp = 0; xp < g.domain_size(i); ++xp) {
                w[i] = xp;
                for (NodeId j = 0; j < n; ++j) {
                    const Assignment& full = plan.in_component[j] ? w : with_x;
                    std::size_t c = code(j, full);
                    plan.required[j][c] = true;
                    plan.slots.push_back(static_cast<std::uint32_t>(
                        offsets_[j] + c * static_cast<std::size_t>(g.domain_size(j)) +
                        static_cast<std::size_t>(full[j])));
                }
            }
            // odometer over the free nodes, last one fastest
            std::size_t k = free_nodes.size();
            while (k > 0) {
                NodeId v = free_nodes[k - 1];
                if (++w[v] < g.domain_size(v)) break;
                w[v] = 0;
                --k;
            }
            if (k == 0) break;
        }
    }
}

std::size_t FactorizedModel::code(NodeId j, std::span<const int> values) const {
    const NodeSet& z = z_[j];
    const auto& stride = strides_[j];
    std::size_t c = 0;
    for (std::size_t k = 0; k < z.size(); ++k) c += stride[k] * static_cast<std::size_t>(values[z[k]]);
    return c;
}

// ---------------------------------------------------------------------------

ObsPartitioner::ObsPartitioner(std::size_t num_partitions, std::uint64_t seed)
    : parts_(num_partitions), seed_(seed) {}

std::size_t ObsPartitioner::partition(std::size_t rank) {
    const std::size_t block = rank / parts_;
    while (cache_.size() < (block + 1) * parts_) {
        const std::size_t b = cache_.size() / parts_;
        Rng rng(derive_seed(seed_, {b}));
        std::vector<std::uint32_t> perm(parts_);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t k = parts_; k > 1; --k) std::swap(perm[k - 1], perm[rng() % k]);
        cache_.insert(cache_.end(), perm.begin(), perm.end());
    }
    return cache_[rank];
}

// ---------------------------------------------------------------------------

namespace {

SliceCounts empty_slice(const FactorizedModel& model) {
    SliceCounts sc;
    sc.value_counts.assign(model.table_size(), 0);
    sc.code_counts.resize(model.num_nodes());
    for (NodeId j = 0; j < model.num_nodes(); ++j) sc.code_counts[j].assign(model.num_codes(j), 0);
    return sc;
}

void count_record(const FactorizedModel& model, SliceCounts& sc, NodeId j, std::size_t code, int value) {
    const auto d = static_cast<std::size_t>(model.graph().domain_size(j));
    ++sc.value_counts[model.table_offset(j) + code * d + static_cast<std::size_t>(value)];
    ++sc.code_counts[j][code];
}

double slice_value(const FactorizedModel& model, const FactorizedModel::ArmPlan& plan, const SliceCounts& sc) {
    const std::size_t n = model.num_nodes();
    thread_local std::vector<double> prob;
    prob.assign(model.table_size(), 0.0);
    for (NodeId j = 0; j < n; ++j) {
        const auto d = static_cast<std::size_t>(model.graph().domain_size(j));
        const std::size_t off = model.table_offset(j);
        for (std::size_t c = 0; c < model.num_codes(j); ++c) {
            if (!plan.required[j][c]) continue;
            const std::uint32_t total = sc.code_counts[j][c];
            if (total == 0) throw Error(ErrorKind::EmptySlice, "slice has an empty bucket");
            for (std::size_t v = 0; v < d; ++v)
                prob[off + c * d + v] = static_cast<double>(sc.value_counts[off + c * d + v]) / total;
        }
    }
    double sum = 0.0;
    const std::uint32_t* slot = plan.slots.data();
    for (std::size_t t = 0; t < plan.num_terms; ++t, slot += n) {
        double term = 1.0;
        for (std::size_t j = 0; j < n && term != 0.0; ++j) term *= prob[slot[j]];
        sum += term;
    }
    return sum;
}

}  // namespace

StrataIndex build_strata(const ObsLog& log, const FactorizedModel& model, ArmIndex arm, std::uint64_t seed) {
    const std::size_t n = model.num_nodes();
    const auto& plan = model.plan(arm);
    StrataIndex out;
    out.partition_sizes.assign(n, 0);
    out.node_minimum.assign(n, 0);

    ObsPartitioner partitioner(n, seed);
    std::vector<std::vector<std::vector<std::size_t>>> buckets(n);
    for (NodeId j = 0; j < n; ++j) buckets[j].resize(model.num_codes(j));
    const auto& obs = log.observational();
    for (std::size_t r = 0; r < obs.size(); ++r) {
        const std::size_t j = partitioner.partition(r);
        buckets[j][model.code(j, log.values(obs[r]))].push_back(obs[r]);
        ++out.partition_sizes[j];
    }
    if (!plan.identifiable) return out;

    std::size_t s = std::numeric_limits<std::size_t>::max();
    for (NodeId j = 0; j < n; ++j) {
        std::size_t m = std::numeric_limits<std::size_t>::max();
        for (std::size_t c = 0; c < model.num_codes(j); ++c)
            if (plan.required[j][c]) m = std::min(m, buckets[j][c].size());
        out.node_minimum[j] = m;
        s = std::min(s, m);
    }
    out.s = s;
    out.slices.assign(s, empty_slice(model));
    if (s == 0) return out;
    for (NodeId j = 0; j < n; ++j)
        for (std::size_t c = 0; c < model.num_codes(j); ++c) {
            if (!plan.required[j][c]) continue;
            const auto& b = buckets[j][c];
            for (std::size_t k = 0; k < b.size(); ++k) count_record(model, out.slices[k % s], j, c, log.value(b[k], j));
        }
    return out;
}

double factorized_stratum_estimate(const StrataIndex& strata, const FactorizedModel& model, ArmIndex arm,
                                   std::size_t s) {
    if (s >= strata.s) throw Error(ErrorKind::EmptySlice, "slice index beyond S");
    return slice_value(model, model.plan(arm), strata.slices[s]);
}

// ---------------------------------------------------------------------------

StrataEngine::StrataEngine(const FactorizedModel& model, std::uint64_t seed)
    : model_(&model), partitioner_(model.num_nodes(), seed), arms_(model.arms().size()) {
    buckets_.resize(model.num_nodes());
    for (NodeId j = 0; j < model.num_nodes(); ++j) buckets_[j].resize(model.num_codes(j));
}

std::size_t StrataEngine::current_minimum(ArmIndex arm) const {
    const auto& plan = model_->plan(arm);
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (NodeId j = 0; j < model_->num_nodes(); ++j)
        for (std::size_t c = 0; c < model_->num_codes(j); ++c)
            if (plan.required[j][c]) m = std::min(m, buckets_[j][c].size());
    return m;
}

void StrataEngine::rebuild(ArmIndex arm, const ObsLog& log) {
    const auto& plan = model_->plan(arm);
    ArmState& st = arms_[arm];
    st.slices.assign(st.s, empty_slice(*model_));
    for (NodeId j = 0; j < model_->num_nodes(); ++j)
        for (std::size_t c = 0; c < model_->num_codes(j); ++c) {
            if (!plan.required[j][c]) continue;
            const auto& b = buckets_[j][c];
            for (std::size_t k = 0; k < b.size(); ++k)
                count_record(*model_, st.slices[k % st.s], j, c, log.value(b[k], j));
        }
    st.y.resize(st.s);
    for (std::size_t s = 0; s < st.s; ++s) st.y[s] = slice_value(*model_, plan, st.slices[s]);
    st.sum = std::accumulate(st.y.begin(), st.y.end(), 0.0);
}

void StrataEngine::observe(const ObsLog& log, std::size_t record) {
    const std::size_t j = partitioner_.partition(ranks_++);
    const std::size_t c = model_->code(j, log.values(record));
    auto& bucket = buckets_[j][c];
    bucket.push_back(record);
    const std::size_t k = bucket.size() - 1;
    const int v = log.value(record, j);

    for (ArmIndex a = 1; a < arms_.size(); ++a) {
        const auto& plan = model_->plan(a);
        if (!plan.identifiable || !plan.required[j][c]) continue;
        ArmState& st = arms_[a];
        if (k == st.s) {
            std::size_t m = current_minimum(a);
            if (m != st.s) {
                st.s = m;
                rebuild(a, log);
                continue;
            }
        }
        if (st.s == 0) continue;
        const std::size_t s = k % st.s;
        count_record(*model_, st.slices[s], j, c, v);
        st.y[s] = slice_value(*model_, plan, st.slices[s]);
        st.sum = std::accumulate(st.y.begin(), st.y.end(), 0.0);
    }
}

}  // namespace cbandit
