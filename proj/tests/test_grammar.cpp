#include "figlearn/grammar.hpp"

#include <cmath>
#include <map>

#include "doctest.h"
#include "figlearn/errors.hpp"

using namespace figlearn;
using namespace figlearn::dsl;

TEST_CASE("grammar construction validates its parameters") {
    CHECK_THROWS_AS(Grammar(0.0, 0.5), Error);
    CHECK_THROWS_AS(Grammar(1.0, 0.5), Error);
    CHECK_THROWS_AS(Grammar(0.5, 0.0), Error);
    CHECK_THROWS_AS(Grammar(0.5, 1.0), Error);
    CHECK_THROWS_AS(Grammar(0.5, 0.5, 2), Error);
    CHECK_NOTHROW(Grammar(0.5, 0.5, 3));
}

TEST_CASE("theta_orient near 1 puts rotations at every root") {
    const Grammar g(1.0 - 1e-12, 0.5, 8);
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        CHECK(g.sample_program(rng).root->kind == NodeKind::AllRotations);
    }
}

TEST_CASE("theta_config near 1 suppresses attach*") {
    const Grammar g(0.5, 1.0 - 1e-12, 10);
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const std::string text = print_program(g.sample_program(rng));
        CHECK(text.find("attach*") == std::string::npos);
    }
}

TEST_CASE("rotations frequency tracks theta_orient") {
    const double theta = 0.73;
    const Grammar g(theta, 0.5, 8);
    Rng rng(5);
    int hits = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        hits += g.sample_program(rng).root->kind == NodeKind::AllRotations ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(hits) / n - theta) < 0.02);
}

TEST_CASE("log prior of a bare primitive") {
    const Grammar g(0.5, 0.5, 12);
    const double lp = g.log_prior(parse_program("p1"));
    // no-rotations choice, then one of five set forms, then one of five leaves
    CHECK(lp == doctest::Approx(std::log(0.5 * 0.2 * 0.2)).epsilon(1e-12));
}

TEST_CASE("two parameterized choices at 0.5 contribute log 1/4") {
    const Grammar g(0.5, 0.5, 12);
    const Program p = parse_program("(rotations (attach p1 p2))");
    const ExpansionCounts c = g.expansion_counts(p);
    CHECK(c.orient_yes == 1);
    CHECK(c.config_free == 1);
    const double theta_part = g.log_prior(p) - c.log_const;
    CHECK(theta_part == doctest::Approx(std::log(0.25)).epsilon(1e-9));
}

TEST_CASE("expansion counts on the documented cases") {
    const Grammar g(0.7, 0.6, 12);
    {
        const ExpansionCounts c = g.expansion_counts(parse_program("(has p2)"));
        CHECK(c.orient_yes == 0);
        CHECK(c.orient_no == 1);
        CHECK(c.config_free == 0);
        CHECK(c.config_fixed == 0);
    }
    {
        const ExpansionCounts c =
            g.expansion_counts(parse_program("(rotations (attach (attach p1 p2) p3))"));
        CHECK(c.orient_yes == 1);
        CHECK(c.orient_no == 0);
        CHECK(c.config_free == 2);
        CHECK(c.config_fixed == 0);
    }
    {
        const ExpansionCounts c =
            g.expansion_counts(parse_program("(attach* (attach p1 p2) p3 4)"));
        CHECK(c.config_free == 1);
        CHECK(c.config_fixed == 1);
    }
}

TEST_CASE("counts reconstruct the prior exactly across parameters") {
    const Grammar sampler(0.5, 0.5, 10);
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const Program p = sampler.sample_program(rng);
        const ExpansionCounts c = sampler.expansion_counts(p);
        for (int j = 0; j < 10; ++j) {
            const double to = 0.05 + 0.09 * j;
            const double tc = 0.93 - 0.08 * j;
            const Grammar g(to, tc, 10);
            CHECK(c.log_prior(to, tc) == doctest::Approx(g.log_prior(p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("log prior matches the sampling frequency of a small program") {
    const Grammar g(0.5, 0.5, 8);
    const double expect = std::exp(g.log_prior(parse_program("p1")));
    Rng rng(7);
    int hits = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const Program p = g.sample_program(rng);
        if (p.root->kind == NodeKind::PrimSet && p.root->prim == 0) ++hits;
    }
    const double freq = static_cast<double>(hits) / n;
    CHECK(std::abs(freq - expect) < 0.001);
}

TEST_CASE("adding a node strictly decreases the prior") {
    const Grammar small(0.5, 0.5, 8);
    const Grammar g(0.5, 0.5, 12);
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        Program p = small.sample_program(rng);
        if (p.root->kind == NodeKind::AllRotations) p = Program{p.root->a};
        const Program wrapped{make_rotate(p.root, 90)};
        CHECK(g.log_prior(wrapped) < g.log_prior(p));
    }
}

TEST_CASE("programs beyond the depth cap have zero prior") {
    const Grammar deep(0.5, 0.5, 12);
    Rng rng(9);
    Program p = parse_program("(attach p1 p2)");
    // nest attaches to depth far past a cap of 6
    for (int i = 0; i < 4; ++i) p = Program{make_attach(p.root, make_prim_set(1))};
    const Grammar shallow(0.5, 0.5, 6);
    CHECK(std::isinf(shallow.log_prior(p)));
    CHECK(shallow.log_prior(p) < 0);
    CHECK(!std::isinf(deep.log_prior(parse_program("(attach p1 p2)"))));
}

TEST_CASE("enumeration covers the capped space with total mass one") {
    {
        const Grammar g(0.5, 0.5, 3);
        const auto all = g.enumerate_all();
        CHECK(all.size() == 9);  // five primitive sets and four has forms
        double total = 0.0;
        for (const auto& [p, lp] : all) total += std::exp(lp);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        const Grammar g(0.3, 0.7, 4);
        const auto all = g.enumerate_all();
        CHECK(all.size() == 18);
        double total = 0.0;
        for (const auto& [p, lp] : all) total += std::exp(lp);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        const Grammar g(0.999, 0.725, 6);
        const auto all = g.enumerate_all();
        CHECK(all.size() == 1648);
        double total = 0.0;
        std::map<std::string, int> seen;
        for (const auto& [p, lp] : all) {
            total += std::exp(lp);
            CHECK(lp == doctest::Approx(g.log_prior(p)).epsilon(1e-9));
            ++seen[print_program(p)];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(seen.size() == all.size());  // unambiguous grammar, no duplicates
    }
}

TEST_CASE("enumeration respects its budget") {
    const Grammar g(0.5, 0.5, 8);
    CHECK_THROWS_AS(g.enumerate_all(10000), Error);
}

TEST_CASE("regeneration sites cover every node with consistent scores") {
    const Grammar g(0.6, 0.4, 12);
    Rng rng(10);
    for (int i = 0; i < 200; ++i) {
        const Program p = g.sample_program(rng);
        const auto sites = g.sites(p);
        CHECK(sites.size() == node_count(p));
        const size_t pick = rng.uniform_int(sites.size());
        const auto& site = sites[pick];
        const NodePtr old_subtree = Grammar::subtree_at(p, site);
        CHECK(!std::isinf(g.log_generation(site, old_subtree)));
        const NodePtr fresh = g.regenerate(site, rng);
        CHECK(!std::isinf(g.log_generation(site, fresh)));
        const Program q = Grammar::replace(p, site, fresh);
        CHECK(!std::isinf(g.log_prior(q)));
        const auto sites_q = g.sites(q);
        REQUIRE(pick < sites_q.size());
        CHECK(sites_q[pick].path == site.path);
        CHECK(sites_q[pick].budget == site.budget);
        CHECK(sites_q[pick].in_body == site.in_body);
    }
}
