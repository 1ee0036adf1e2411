#include "support.hpp"

#include "cbandit/error.hpp"
#include "cbandit/policies.hpp"

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <functional>

using namespace cbt;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::IoError;
}

PolicyConfig make_config(const Scm& scm, PolicyKind kind, double budget, double cost, std::uint64_t seed) {
    PolicyConfig c;
    c.kind = kind;
    c.budget = budget;
    c.costs = uniform_costs(scm.arms(), cost);
    c.seed = seed;
    return c;
}

// X -> Y with P(X = 1) = px and P(Y = 1 | X = x) = {y0, y1}.
Scm single_cause(double px, double y0, double y1) {
    const Admg g = make_graph({"X", "Y"}, {"X->Y"}, {}, "Y");
    return Scm(g, {}, {Cpt{{}, {}, {1.0 - px, px}}, Cpt{{0}, {}, {1.0 - y0, y0, 1.0 - y1, y1}}});
}

std::size_t count_phase(const PolicyTrace& t, Phase p) {
    std::size_t n = 0;
    for (const auto& r : t.rounds) n += r.phase == p ? 1 : 0;
    return n;
}

const PolicyKind kAllKinds[] = {PolicyKind::CumulativeUcb,    PolicyKind::UniformCostCausalUcb,
                                PolicyKind::BudgetedKube,     PolicyKind::SimpleBudgeted,
                                PolicyKind::SimpleNoBackdoor, PolicyKind::GammaNb,
                                PolicyKind::SuccessiveRejects};

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("policy names round trip") {
    for (PolicyKind k : kAllKinds) CHECK(parse_policy_kind(to_string(k)) == k);
    CHECK(kind_of([] { parse_policy_kind("ucb"); }) == ErrorKind::ConfigInvalid);
    CHECK(is_cumulative(PolicyKind::CumulativeUcb));
    CHECK_FALSE(is_cumulative(PolicyKind::GammaNb));
}

TEST_CASE("every policy stays within budget and accounts for it") {
    const Scm scm = make_parallel_model({4, {}, 0.3});
    Rng rng(9);
    for (PolicyKind kind : kAllKinds) {
        for (int rep = 0; rep < 6; ++rep) {
            PolicyConfig c = make_config(scm, kind, 0, 1, rep);
            if (kind != PolicyKind::GammaNb && kind != PolicyKind::UniformCostCausalUcb)
                for (ArmIndex a = 1; a < c.costs.size(); ++a) c.costs[a] = 1.0 + static_cast<double>(rng() % 4);
            c.budget = 40.0 + static_cast<double>(rng() % 300) + 0.5 * static_cast<double>(rep % 2);
            CAPTURE(to_string(kind));
            CAPTURE(c.budget);
            const PolicyTrace t = run_policy(scm, c);
            CHECK(t.total_cost() <= c.budget + 1e-9);
            double remaining = c.budget;
            std::size_t expect_t = 1;
            for (const auto& r : t.rounds) {
                remaining -= r.cost;
                CHECK(r.t == expect_t++);
                CHECK(r.cost == c.costs[r.arm]);
                CHECK(std::abs(r.budget_remaining - remaining) < 1e-9);
                CHECK(r.budget_remaining >= -1e-9);
            }
            CHECK(t.final_estimates.size() == scm.arms().size());
            CHECK(is_cumulative(kind) != t.chosen.has_value());
        }
    }
}

TEST_CASE("a budget that only covers initialization yields an init-only trace") {
    for (std::size_t n : {2u, 3u, 5u}) {
        const Scm scm = make_parallel_model({n, {}, 0.3});
        for (double c : {1.0, 2.5}) {
            PolicyConfig cfg = make_config(scm, PolicyKind::CumulativeUcb, 0, c, 3);
            cfg.budget = 1.0 + c * static_cast<double>(2 * n);
            const PolicyTrace t = run_cumulative_ucb(scm, cfg);
            REQUIRE(t.rounds.size() == 2 * n + 1);
            for (std::size_t k = 0; k < t.rounds.size(); ++k) {
                CHECK(t.rounds[k].phase == Phase::Init);
                CHECK(t.rounds[k].arm == k);
            }
            CHECK(t.rounds.back().budget_remaining == 0.0);
        }
    }
}

TEST_CASE("insufficient budgets are rejected") {
    const Scm scm = make_parallel_model({3, {}, 0.3});
    const double init = 1.0 + 6.0 * 2.0;
    for (PolicyKind kind : {PolicyKind::CumulativeUcb, PolicyKind::BudgetedKube, PolicyKind::SuccessiveRejects}) {
        const PolicyConfig c = make_config(scm, kind, init - 0.5, 2.0, 1);
        CHECK(kind_of([&] { run_policy(scm, c); }) == ErrorKind::InsufficientBudget);
        CHECK_NOTHROW(run_policy(scm, make_config(scm, kind, init, 2.0, 1)));
    }
    for (PolicyKind kind : {PolicyKind::SimpleBudgeted, PolicyKind::SimpleNoBackdoor, PolicyKind::GammaNb}) {
        CHECK(kind_of([&] { run_policy(scm, make_config(scm, kind, 1.5, 1.0, 1)); }) == ErrorKind::InsufficientBudget);
        CHECK_NOTHROW(run_policy(scm, make_config(scm, kind, 2.0, 1.0, 1)));
    }
    CHECK(kind_of([&] { run_policy(scm, make_config(scm, PolicyKind::SimpleBudgeted, -1.0, 1.0, 1)); }) ==
          ErrorKind::InsufficientBudget);
    PolicyConfig bad = make_config(scm, PolicyKind::CumulativeUcb, 100, 1.0, 1);
    bad.costs.pop_back();
    CHECK(kind_of([&] { run_policy(scm, bad); }) == ErrorKind::ModelInvalid);
}

TEST_CASE("policies are deterministic in their seed") {
    const Scm scm = make_parallel_model({3, {}, 0.3});
    for (PolicyKind kind : kAllKinds) {
        const PolicyConfig c = make_config(scm, kind, 300, 1.0, 42);
        const PolicyTrace a = run_policy(scm, c);
        const PolicyTrace b = run_policy(scm, c);
        REQUIRE(a.rounds.size() == b.rounds.size());
        for (std::size_t k = 0; k < a.rounds.size(); ++k) {
            CHECK(a.rounds[k].arm == b.rounds[k].arm);
            CHECK(a.rounds[k].reward == b.rounds[k].reward);
        }
        CHECK(a.final_estimates == b.final_estimates);
        CHECK(a.chosen == b.chosen);
    }
}

TEST_CASE("exploration guard replays from the recorded state") {
    const Scm scm = make_parallel_model({4, {}, 0.3});
    for (double c : {1.0, 3.0}) {
        PolicyConfig cfg = make_config(scm, PolicyKind::CumulativeUcb, 600, c, 17);
        const PolicyTrace t = run_cumulative_ucb(scm, cfg);
        const std::size_t k = scm.arms().size();
        std::size_t observed = 0, exploited = 0;
        for (std::size_t r = k; r < t.rounds.size(); ++r) {
            const Round& round = t.rounds[r];
            const double before = round.budget_remaining + round.cost;
            const bool guard = static_cast<double>(round.n0_before) < round.beta * round.beta * std::log(double(round.t)) ||
                               before < c;
            CHECK(round.beta >= 0.0);
            CHECK(round.beta <= std::max(1.0, std::sqrt(std::log(double(round.t)))) + 1e-12);
            if (guard) {
                CHECK(round.phase == Phase::Observe);
                CHECK(round.arm == 0);
                ++observed;
            } else {
                CHECK(round.phase == Phase::Exploit);
                ++exploited;
            }
        }
        CHECK(exploited > 0);
        CHECK(t.rounds.back().budget_remaining < 1.0);
    }
}

TEST_CASE("snapshots are taken at the requested interval") {
    const Scm scm = make_parallel_model({3, {}, 0.3});
    PolicyConfig c = make_config(scm, PolicyKind::CumulativeUcb, 200, 1.0, 5);
    c.snapshot_interval = 25;
    const PolicyTrace t = run_cumulative_ucb(scm, c);
    REQUIRE_FALSE(t.snapshots.empty());
    for (const Snapshot& s : t.snapshots) {
        CHECK(s.t % 25 == 0);
        CHECK(s.mu_hat.size() == scm.arms().size());
        CHECK(s.ucb.size() == scm.arms().size());
        CHECK(s.n[0] >= 1);
        for (std::size_t a = 0; a < s.ucb.size(); ++a) CHECK(s.ucb[a] >= s.mu_hat[a]);
    }
    CHECK(run_cumulative_ucb(scm, make_config(scm, PolicyKind::CumulativeUcb, 200, 1.0, 5)).snapshots.empty());
}

TEST_CASE("uniform-cost causal UCB matches the cost-aware rule at unit costs") {
    const Scm scm = make_parallel_model({4, {}, 0.3});
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const PolicyTrace a = run_policy(scm, make_config(scm, PolicyKind::CumulativeUcb, 400, 1.0, seed));
        const PolicyTrace b = run_policy(scm, make_config(scm, PolicyKind::UniformCostCausalUcb, 400, 1.0, seed));
        REQUIRE(a.rounds.size() == b.rounds.size());
        for (std::size_t k = 0; k < a.rounds.size(); ++k) CHECK(a.rounds[k].arm == b.rounds[k].arm);
    }
    const Admg g = make_graph({"X", "Y"}, {"X->Y"}, {"X<->Y"}, "Y");
    Rng rng(1);
    const Scm hidden = random_binary_scm(g, rng);
    CHECK(kind_of([&] {
              run_policy(hidden, make_config(hidden, PolicyKind::UniformCostCausalUcb, 100, 1.0, 1));
          }) == ErrorKind::GraphHasHiddenConfounders);
}

TEST_CASE("cumulative UCB concentrates on the best cost ratio") {
    const Scm scm = single_cause(0.5, 0.1, 0.9);
    const PolicyTrace t = run_cumulative_ucb(scm, make_config(scm, PolicyKind::CumulativeUcb, 5000, 1.0, 8));
    const ArmIndex best = scm.arms().index_of(0, 1);
    std::size_t good = 0;
    for (const auto& r : t.rounds) good += r.arm == best ? 1 : 0;
    CHECK(static_cast<double>(good) / static_cast<double>(t.rounds.size()) > 0.8);
}

TEST_CASE("KUBE spends the budget and favours the best ratio") {
    const Scm scm = single_cause(0.5, 0.1, 0.9);
    PolicyConfig c = make_config(scm, PolicyKind::BudgetedKube, 5000, 1.0, 4);
    const PolicyTrace t = run_budgeted_kube(scm, c);
    CHECK(t.rounds.size() == 5000);
    const ArmIndex best = scm.arms().index_of(0, 1);
    std::size_t bad = 0;
    for (const auto& r : t.rounds) bad += r.arm != best ? 1 : 0;
    CHECK(static_cast<double>(bad) / static_cast<double>(t.rounds.size()) <= 0.2);

    c.costs = {1.0, 3.0, 7.0};
    c.budget = 100.5;
    const PolicyTrace u = run_budgeted_kube(scm, c);
    CHECK(u.rounds.back().budget_remaining < 1.0);
    for (std::size_t a = 0; a < 3; ++a) CHECK(std::count_if(u.rounds.begin(), u.rounds.end(), [&](const Round& r) {
                                                  return r.arm == a;
                                              }) >= 1);
}

TEST_CASE("simple-regret phase accounting") {
    const Scm scm = make_parallel_model({3, {0.001, 0.02, 0.5}, 0.3});
    for (double budget : {101.0, 400.0, 1000.0}) {
        for (double c : {1.0, 2.0}) {
            const PolicyConfig cfg = make_config(scm, PolicyKind::SimpleBudgeted, budget, c, 11);
            const PolicyTrace t = run_simple_budgeted(scm, cfg);
            const auto half = static_cast<std::size_t>(std::floor(budget / 2));
            for (std::size_t r = 0; r < half; ++r) CHECK(t.rounds[r].phase == Phase::Observe);
            REQUIRE_FALSE(t.infrequent.empty());
            const double sum_c = c * static_cast<double>(t.infrequent.size());
            CHECK(t.pulls_per_infrequent_arm == static_cast<std::size_t>(std::floor(budget / (2 * sum_c))));
            CHECK(count_phase(t, Phase::Explore) == t.pulls_per_infrequent_arm * t.infrequent.size());
            CHECK(t.observation_cost == doctest::Approx(static_cast<double>(half)));
            CHECK(t.exploration_cost == doctest::Approx(t.pulls_per_infrequent_arm * sum_c));
            for (const auto& r : t.rounds)
                if (r.phase == Phase::Explore || r.phase == Phase::ExploreExtra)
                    CHECK(std::find(t.infrequent.begin(), t.infrequent.end(), r.arm) != t.infrequent.end());
            // leftovers go to the cheapest affordable infrequent arms
            CHECK(t.rounds.back().budget_remaining < c);
        }
    }
}

TEST_CASE("no infrequent arms sends the whole budget to observation") {
    const Scm scm = single_cause(0.7, 0.2, 0.6);
    PolicyConfig c = make_config(scm, PolicyKind::SimpleBudgeted, 200, 10.0, 6);
    const PolicyTrace t = run_simple_budgeted(scm, c);
    CHECK(t.infrequent.empty());
    CHECK(t.rounds.size() == 200);
    CHECK(count_phase(t, Phase::Observe) == 200);
    CHECK(t.observation_cost == 200.0);
    CHECK(t.exploration_cost == 0.0);
    CHECK(t.chosen == scm.arms().index_of(0, 1));
}

TEST_CASE("rare interventions land in the explored set") {
    const Scm scm = make_parallel_model({3, {0.001, 0.02, 0.5}, 0.3});
    const ArmIndex rare = scm.arms().index_of(0, 1);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PolicyTrace t = run_simple_budgeted(scm, make_config(scm, PolicyKind::SimpleBudgeted, 1000, 1.0, seed));
        hits += std::find(t.infrequent.begin(), t.infrequent.end(), rare) != t.infrequent.end() ? 1 : 0;
    }
    CHECK(hits >= 45);
}

TEST_CASE("gamma-NB uses the m' threshold") {
    const Scm scm = make_parallel_model({3, {0.001, 0.02, 0.5}, 0.3});
    const PolicyTrace t = run_gamma_nb(scm, make_config(scm, PolicyKind::GammaNb, 1000, 1.0, 3));
    auto has = [&](NodeId i, int x) {
        const ArmIndex a = scm.arms().index_of(i, x);
        return std::find(t.infrequent.begin(), t.infrequent.end(), a) != t.infrequent.end();
    };
    CHECK(has(0, 1));
    CHECK(has(1, 1));
    CHECK_FALSE(has(0, 0));
    CHECK_FALSE(has(1, 0));
}

TEST_CASE("gamma-NB preconditions") {
    const Scm scm = make_parallel_model({3, {}, 0.3});
    PolicyConfig c = make_config(scm, PolicyKind::GammaNb, 200, 1.0, 1);
    c.costs[2] = 2.0;
    CHECK(kind_of([&] { run_gamma_nb(scm, c); }) == ErrorKind::NonUniformCost);
    c.allow_nonuniform_costs = true;
    CHECK_NOTHROW(run_gamma_nb(scm, c));

    const Admg g = make_graph({"X", "Y"}, {"X->Y"}, {"X<->Y"}, "Y");
    Rng rng(1);
    const Scm confounded = random_binary_scm(g, rng);
    for (PolicyKind kind : {PolicyKind::GammaNb, PolicyKind::SimpleNoBackdoor})
        CHECK(kind_of([&] { run_policy(confounded, make_config(confounded, kind, 100, 1.0, 1)); }) ==
              ErrorKind::GraphNotNoBackdoor);
    CHECK_NOTHROW(run_simple_budgeted(confounded, make_config(confounded, PolicyKind::SimpleBudgeted, 100, 1.0, 1)));
}

TEST_CASE("successive rejects on two interventions") {
    const Scm scm = single_cause(0.5, 0.2, 0.8);
    const PolicyTrace t = run_successive_rejects(scm, make_config(scm, PolicyKind::SuccessiveRejects, 300, 1.0, 2));
    CHECK(t.chosen == scm.arms().index_of(0, 1));
    CHECK(t.total_cost() <= 300.0);

    const Scm fixed = single_cause(0.5, 0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(run_successive_rejects(fixed, make_config(fixed, PolicyKind::SuccessiveRejects, 30, 1.0, seed)).chosen ==
              fixed.arms().index_of(0, 1));
}

TEST_CASE("simple-regret policies identify a clear winner") {
    const Scm scm = single_cause(0.5, 0.2, 0.8);
    const ArmIndex best = scm.arms().index_of(0, 1);
    for (PolicyKind kind : {PolicyKind::SimpleBudgeted, PolicyKind::SimpleNoBackdoor, PolicyKind::GammaNb,
                            PolicyKind::SuccessiveRejects}) {
        int right = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
            right += run_policy(scm, make_config(scm, kind, 5000, 1.0, seed)).chosen == best ? 1 : 0;
        CAPTURE(to_string(kind));
        CHECK(right >= 190);
    }
}

TEST_CASE("factorized estimator path gives a valid choice") {
    Rng model_rng(3);
    const Scm scm = make_xor_model(fig6_graph(), model_rng);
    PolicyConfig c = make_config(scm, PolicyKind::SimpleBudgeted, 400, 1.0, 9);
    c.estimator = EstimatorPath::Factorized;
    const PolicyTrace t = run_simple_budgeted(scm, c);
    REQUIRE(t.chosen.has_value());
    CHECK(*t.chosen < scm.arms().size());
    for (double m : t.final_estimates) {
        CHECK(m >= 0.0);
        CHECK(m <= 1.0);
    }
}

}  // TEST_SUITE
