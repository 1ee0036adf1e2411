#include "support.hpp"

#include "cbandit/error.hpp"
#include "cbandit/knapsack.hpp"

#include <doctest.h>

#include <cmath>
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

double empirical_mean(const Scm& scm, ArmIndex arm, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Assignment out;
    std::size_t ones = 0;
    for (std::size_t k = 0; k < n; ++k) ones += scm.sample(arm, rng, out);
    return static_cast<double>(ones) / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("scm") {

TEST_CASE("arm set layout and labels") {
    const Admg g = parallel_graph(3);
    const ArmSet arms(g);
    REQUIRE(arms.size() == 7);
    CHECK(arms[0].observe);
    CHECK(arms.label(0) == "a0");
    CHECK(arms.label(1) == "X1=0");
    CHECK(arms.label(6) == "X3=1");
    CHECK(arms.index_of(1, 1) == 4);
    for (ArmIndex a = 0; a < arms.size(); ++a) CHECK(arms.parse_label(arms.label(a)) == a);
    CHECK(kind_of([&] { arms.index_of(3, 0); }) == ErrorKind::InvalidArm);
    CHECK(kind_of([&] { arms.index_of(0, 2); }) == ErrorKind::InvalidArm);
    CHECK(kind_of([&] { arms.parse_label("Y=1"); }) == ErrorKind::InvalidArm);
    CHECK(kind_of([&] { arms.at(7); }) == ErrorKind::InvalidArm);
}

TEST_CASE("cost sets") {
    const ArmSet arms(parallel_graph(2));
    const CostSet c = uniform_costs(arms, 3.0);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 3.0);
    CHECK_NOTHROW(validate_costs(arms, c));
    CHECK(all_integer(c));
    CostSet bad = c;
    bad[0] = 2.0;
    CHECK(kind_of([&] { validate_costs(arms, bad); }) == ErrorKind::ModelInvalid);
    bad = c;
    bad[2] = 0.0;
    CHECK(kind_of([&] { validate_costs(arms, bad); }) == ErrorKind::ModelInvalid);
    CHECK(kind_of([&] { validate_costs(arms, CostSet{1.0}); }) == ErrorKind::ModelInvalid);
    bad = c;
    bad[1] = 2.5;
    CHECK_FALSE(all_integer(bad));
}

TEST_CASE("degenerate reward always samples one") {
    const Admg g({{"Y", 2}}, {}, {}, 0);
    const Scm scm(g, {}, {Cpt{{}, {}, {0.0, 1.0}}});
    Rng rng(1);
    Assignment out;
    for (int k = 0; k < 100; ++k) CHECK(scm.sample(0, rng, out) == 1);
    CHECK(scm.oracle_mean(0) == 1.0);
}

TEST_CASE("parallel model oracle values") {
    const Scm scm = make_parallel_model({});
    const ArmSet& arms = scm.arms();
    CHECK(std::abs(scm.oracle_mean(arms.index_of(0, 1)) - 0.8) < 1e-12);
    CHECK(std::abs(scm.oracle_mean(0) - 0.5) < 1e-12);
    CHECK(std::abs(scm.oracle_mean(arms.index_of(2, 1)) - 0.5) < 1e-12);
    const double eps_prime = 0.02 * 0.3 / 0.98;
    CHECK(std::abs(scm.oracle_mean(arms.index_of(0, 0)) - (0.5 - eps_prime)) < 1e-12);
}

TEST_CASE("parallel model edge cases") {
    const Scm flat = make_parallel_model({4, {}, 0.0});
    for (double m : flat.oracle_means()) CHECK(std::abs(m - 0.5) < 1e-12);
    const Scm certain = make_parallel_model({1, {1.0}, 0.3});
    CHECK(std::abs(certain.oracle_mean(0) - 0.8) < 1e-12);
    CHECK(kind_of([] { make_parallel_model({3, {0.5, 0.5}, 0.3}); }) == ErrorKind::InvalidProbability);
    CHECK(kind_of([] { make_parallel_model({3, {}, 0.7}); }) == ErrorKind::InvalidProbability);
    CHECK(kind_of([] { make_parallel_model({2, {1.5, 0.5}, 0.3}); }) == ErrorKind::InvalidProbability);
    CHECK(kind_of([] { make_parallel_model({2, {0.9, 0.5}, 0.3}); }) == ErrorKind::InvalidProbability);
}

TEST_CASE("interventional sampling hits the analytic mean") {
    const Scm scm = make_parallel_model({});
    const double m = empirical_mean(scm, scm.arms().index_of(0, 1), 100000, 5);
    CHECK(std::abs(m - 0.8) < 0.01);
}

TEST_CASE("clamped node is recorded at its intervened value") {
    Rng rng(6);
    const Scm scm = make_xor_model(fig6_graph(), rng);
    Assignment out;
    for (ArmIndex a = 1; a < scm.arms().size(); ++a)
        for (int k = 0; k < 200; ++k) {
            scm.sample(a, rng, out);
            CHECK(out[scm.arms()[a].node] == scm.arms()[a].value);
        }
}

TEST_CASE("empirical means concentrate around the oracle") {
    Rng graph_rng(21);
    const double tol = 4.0 * std::sqrt(0.25 / 100000.0);
    for (int rep = 0; rep < 4; ++rep) {
        const Admg g = random_admg(3 + rep, 0.5, 0.3, graph_rng);
        const Scm scm = random_binary_scm(g, graph_rng);
        const auto means = scm.oracle_means();
        for (ArmIndex a = 0; a < scm.arms().size(); ++a)
            CHECK(std::abs(empirical_mean(scm, a, 100000, 100 + a) - means[a]) < tol);
    }
}

TEST_CASE("monte carlo helper reports intervals") {
    const Scm scm = make_parallel_model({3, {}, 0.3});
    Rng rng(3);
    const auto mc = monte_carlo_means(scm, 20000, rng);
    const auto exact = scm.oracle_means();
    REQUIRE(mc.size() == exact.size());
    for (std::size_t a = 0; a < mc.size(); ++a) {
        CHECK(mc[a].half_width > 0.0);
        CHECK(std::abs(mc[a].mean - exact[a]) < 2.0 * mc[a].half_width);
    }
}

TEST_CASE("intervened CPT is never read") {
    Rng rng(9);
    const Admg g = fig6_graph();
    const Scm scm = random_binary_scm(g, rng);
    const NodeId x3 = id(g, "X3");
    std::vector<Cpt> cpts;
    for (NodeId v = 0; v < g.num_nodes(); ++v) cpts.push_back(scm.cpt(v));
    for (double& p : cpts[x3].table) p = 0.5;
    const Scm perturbed(g, scm.latents(), cpts);
    for (int x = 0; x < 2; ++x) {
        const ArmIndex a = scm.arms().index_of(x3, x);
        Rng r1(42), r2(42);
        Assignment o1, o2;
        for (int k = 0; k < 500; ++k) {
            CHECK(scm.sample(a, r1, o1) == perturbed.sample(a, r2, o2));
            CHECK(o1 == o2);
        }
        CHECK(scm.oracle_mean(a) == perturbed.oracle_mean(a));
    }
}

TEST_CASE("equal seeds give equal streams") {
    Rng rng(1);
    const Scm scm = make_xor_model(fig6_graph(), rng);
    Rng a(77), b(77);
    Assignment oa, ob;
    for (int k = 0; k < 1000; ++k) {
        const ArmIndex arm = static_cast<ArmIndex>(k) % scm.arms().size();
        CHECK(scm.sample(arm, a, oa) == scm.sample(arm, b, ob));
        CHECK(oa == ob);
    }
}

TEST_CASE("xor model tables") {
    const Admg g = make_graph({"A", "B", "C"}, {"A->C", "B->C"}, {}, "C");
    Rng rng(2);
    const Scm scm = make_xor_model(g, rng);
    const Cpt& c = scm.cpt(2);
    REQUIRE(c.parents == NodeSet{0, 1});
    // rows (A, B) = 00, 01, 10, 11; entry [row][1] = P(C = 1)
    CHECK(c.table[2 * 2 + 1] == doctest::Approx(0.8));
    CHECK(c.table[1 * 2 + 1] == doctest::Approx(0.8));
    CHECK(c.table[3 * 2 + 1] == doctest::Approx(0.2));
    CHECK(c.table[0 * 2 + 1] == doctest::Approx(0.2));
    for (NodeId root : {NodeId{0}, NodeId{1}}) {
        const double p = scm.cpt(root).table[1];
        CHECK(p >= 0.5);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("xor latents enter the parity") {
    const Admg g = make_graph({"A", "B"}, {"A->B"}, {"A<->B"}, "B");
    Rng rng(4);
    const Scm scm = make_xor_model(g, rng);
    REQUIRE(scm.latents().size() == 1);
    const Cpt& b = scm.cpt(1);
    REQUIRE(b.latents.size() == 1);
    // rows (A, U) = 00, 01, 10, 11
    CHECK(b.table[0 * 2 + 1] == doctest::Approx(0.2));
    CHECK(b.table[1 * 2 + 1] == doctest::Approx(0.8));
    CHECK(b.table[2 * 2 + 1] == doctest::Approx(0.8));
    CHECK(b.table[3 * 2 + 1] == doctest::Approx(0.2));
    // root with a latent parent is an XOR node too
    const Cpt& a = scm.cpt(0);
    CHECK(a.table[0 * 2 + 1] == doctest::Approx(0.2));
    CHECK(a.table[1 * 2 + 1] == doctest::Approx(0.8));
}

TEST_CASE("xor model rejects non-binary graphs") {
    const Admg g({{"A", 3}, {"Y", 2}}, {{0, 1}}, {}, 1);
    Rng rng(1);
    CHECK(kind_of([&] { make_xor_model(g, rng); }) == ErrorKind::NonBinaryGraph);
}

TEST_CASE("oracle refuses oversized state spaces") {
    std::vector<NodeSpec> specs;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int v = 0; v < 26; ++v) specs.push_back({"V" + std::to_string(v), 2});
    for (NodeId v = 0; v + 1 < 26; ++v) edges.emplace_back(v, v + 1);
    const Admg g(specs, edges, {}, 25);
    Rng rng(5);
    const Scm scm = random_binary_scm(g, rng);
    CHECK(scm.oracle_state_count(0) > kOracleStateCap);
    CHECK(kind_of([&] { scm.oracle_mean(0); }) == ErrorKind::StateSpaceTooLarge);
}

TEST_CASE("model validation") {
    const Admg g = make_graph({"X", "Y"}, {"X->Y"}, {}, "Y");
    CHECK(kind_of([&] { Scm(g, {}, {Cpt{{}, {}, {0.5, 0.5}}}); }) == ErrorKind::ModelInvalid);
    CHECK(kind_of([&] { Scm(g, {}, {Cpt{{}, {}, {0.5, 0.5}}, Cpt{{0}, {}, {0.5, 0.5}}}); }) ==
          ErrorKind::ModelInvalid);
    CHECK(kind_of([&] { Scm(g, {}, {Cpt{{}, {}, {0.6, 0.5}}, Cpt{{0}, {}, {0.5, 0.5, 0.5, 0.5}}}); }) ==
          ErrorKind::InvalidProbability);
    CHECK(kind_of([&] { Scm(g, {}, {Cpt{{1}, {}, {0.5, 0.5, 0.5, 0.5}}, Cpt{{0}, {}, {0.5, 0.5, 0.5, 0.5}}}); }) ==
          ErrorKind::ModelInvalid);
    // a CPT may ignore a graph parent
    CHECK_NOTHROW(Scm(g, {}, {Cpt{{}, {}, {0.5, 0.5}}, Cpt{{}, {}, {0.5, 0.5}}}));
}

}  // TEST_SUITE

TEST_SUITE("knapsack") {

TEST_CASE("worked examples") {
    CHECK(optimal_value({0.5, 0.8}, {1.0, 2.0}, 4) == doctest::Approx(2.0));
    CHECK(optimal_value({0.5, 0.8}, {1.0, 2.0}, 0) == 0.0);
    CHECK(optimal_value({0.3}, {2.0}, 7) == doctest::Approx(0.9));
    CHECK(kind_of([] { optimal_value({0.5, 0.8}, {1.0, 2.5}, 4); }) == ErrorKind::NonIntegerCosts);
}

TEST_CASE("dynamic program matches count-vector enumeration") {
    Rng rng(100);
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t k = 1 + rng() % 4;
        std::vector<double> means(k);
        std::vector<int> costs(k);
        CostSet cost_set(k);
        for (std::size_t a = 0; a < k; ++a) {
            means[a] = unit_uniform(rng);
            costs[a] = a == 0 ? 1 : 1 + static_cast<int>(rng() % 6);
            cost_set[a] = costs[a];
        }
        const auto table = optimal_value_table(means, cost_set, 20);
        for (int b = 0; b <= 20; ++b) {
            const double expected = brute_force_knapsack(means, costs, b);
            CHECK(std::abs(optimal_value(means, cost_set, b) - expected) < 1e-9);
            CHECK(std::abs(table[b] - expected) < 1e-9);
            if (b > 0) CHECK(table[b] >= table[b - 1]);
            const auto counts = optimal_counts(means, cost_set, b);
            double value = 0.0, spent = 0.0;
            for (std::size_t a = 0; a < k; ++a) {
                value += counts[a] * means[a];
                spent += counts[a] * cost_set[a];
            }
            CHECK(spent <= b);
            CHECK(std::abs(value - expected) < 1e-9);
        }
    }
}

TEST_CASE("ratio-optimal arm and gaps") {
    const std::vector<double> means{0.5, 0.8, 0.9};
    const CostSet costs{1.0, 2.0, 1.5};
    CHECK(best_ratio_arm(means, costs) == 2);
    const auto gaps = ratio_gaps(means, costs);
    CHECK(gaps[2] == 0.0);
    CHECK(gaps[0] == doctest::Approx(0.6 - 0.5));
    CHECK(gaps[1] == doctest::Approx(0.6 - 0.4));
    // ties go to the lowest index
    CHECK(best_ratio_arm({0.5, 1.0}, {1.0, 2.0}) == 0);
}

TEST_CASE("gaps are non-negative and vanish at the ratio-optimal arm") {
    Rng rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t k = 2 + rng() % 6;
        std::vector<double> means(k);
        CostSet costs(k, 1.0);
        for (std::size_t a = 0; a < k; ++a) {
            means[a] = unit_uniform(rng);
            if (a) costs[a] = 1.0 + 4.0 * unit_uniform(rng);
        }
        const auto gaps = ratio_gaps(means, costs);
        CHECK(gaps[best_ratio_arm(means, costs)] == 0.0);
        for (double d : gaps) CHECK(d >= 0.0);
    }
}

}  // TEST_SUITE
