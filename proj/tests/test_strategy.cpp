#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "mechmatch/corpus.hpp"
#include "mechmatch/io.hpp"
#include "mechmatch/strategy.hpp"
#include "oracle.hpp"

using namespace mechmatch;

namespace {

Matching m_of(std::initializer_list<Edge> list) {
    Matching m;
    for (const Edge& e : list) m.edges.insert(make_edge(e.first, e.second));
    return m;
}

LabeledGraph drop_vertices(const LabeledGraph& g, const std::set<int>& hidden) {
    std::set<int> keep;
    for (int v : g.vertex_ids())
        if (!hidden.count(v)) keep.insert(v);
    return induced_subgraph(g, keep);
}

// Replays a deviation record against its defining pieces: probabilities sum
// to one, leftovers are exactly the agent's unmatched visible vertices,
// each second stage is the canonical maximum on hidden + leftover, and the
// total replays from the parts.
void check_record(const LabeledGraph& g, const Mechanism& mech, int agent,
                  const std::set<int>& hidden) {
    const DeviationRecord rec = deviate(g, mech, agent, hidden);
    CHECK(rec.agent == agent);
    CHECK(rec.hidden == hidden);
    const LabeledGraph reduced = drop_vertices(g, hidden);
    const OutcomeDistribution dist = mech.run(reduced);
    REQUIRE(rec.outcomes.size() == dist.outcomes.size());
    Rat prob_total = 0;
    Rat utility_total = 0;
    for (std::size_t i = 0; i < rec.outcomes.size(); ++i) {
        const DeviationOutcome& o = rec.outcomes[i];
        CHECK(o.probability == dist.outcomes[i].probability);
        CHECK(o.first_stage == dist.outcomes[i].matching);
        std::set<int> expect_leftover;
        for (int v : reduced.agent_vertices(agent))
            if (!o.first_stage.covered_vertices().count(v))
                expect_leftover.insert(v);
        CHECK(o.leftover == expect_leftover);
        CHECK(o.second_stage == second_stage(g, agent, hidden, o.first_stage));
        std::set<int> pool = hidden;
        pool.insert(expect_leftover.begin(), expect_leftover.end());
        CHECK(o.second_stage ==
              oracle::canonical_maximum(induced_subgraph(g, pool)));
        prob_total += o.probability;
        utility_total +=
            o.probability * (Rat(utilities(reduced, o.first_stage)[agent - 1]) +
                             Rat(2 * o.second_stage.size()));
    }
    CHECK(prob_total == Rat(1));
    CHECK(rec.total_utility == utility_total);
    CHECK(rec.total_utility == deviation_utility(g, mech, agent, hidden));
}

bool has_violation(const std::vector<Violation>& vs, int agent,
                   const std::set<int>& hidden, const Rat& truthful,
                   const Rat& deviating) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
        return v.agent == agent && v.hidden == hidden &&
               v.truthful == truthful && v.deviating == deviating;
    });
}

}  // namespace

TEST_CASE("second stage matches the hidden pair after a perfect first stage") {
    const LabeledGraph f3 = figure("fig3");
    const std::set<int> hidden{5, 6};
    const LabeledGraph reduced = drop_vertices(f3, hidden);
    const Matching fs = optimal_mechanism(reduced);
    REQUIRE(fs.size() == 4);  // perfect on the remaining eight vertices
    CHECK(second_stage(f3, 2, hidden, fs) == m_of({{5, 6}}));
}

TEST_CASE("second stage pairs leftovers with hidden vertices") {
    const LabeledGraph f1a = figure("fig1a");
    // First stage {(2,3)} leaves agent 1's visible vertices 1 and 4 free;
    // with 5 and 6 hidden the canonical repair is (4,5).
    CHECK(second_stage(f1a, 1, {5, 6}, m_of({{2, 3}})) == m_of({{4, 5}}));
    // Nothing hidden: repairs only use leftover vertices, which a maximal
    // first stage never leaves adjacent.
    CHECK(second_stage(f1a, 1, {}, m_of({{2, 3}, {4, 5}, {6, 7}})) ==
          Matching{});
}

TEST_CASE("second stage input validation") {
    const LabeledGraph f3 = figure("fig3");
    // Vertex 5 belongs to agent 2, not agent 1.
    CHECK_THROWS_AS((void)second_stage(f3, 1, {5}, Matching{}), InputError);
    CHECK_THROWS_AS((void)second_stage(f3, 2, {99}, Matching{}), InputError);
    CHECK_THROWS_AS((void)second_stage(f3, 0, {}, Matching{}), InputError);
    CHECK_THROWS_AS((void)second_stage(f3, 4, {}, Matching{}), InputError);
    // First stage touching a hidden vertex is not a matching of the
    // reduced graph.
    CHECK_THROWS_AS(
        (void)second_stage(f3, 2, {5, 6}, m_of({{5, 6}})), InputError);
    CHECK_THROWS_AS(
        (void)second_stage(f3, 2, {5, 6}, m_of({{4, 5}})), InputError);
}

TEST_CASE("hiding nothing is the truthful utility") {
    const LabeledGraph f1a = figure("fig1a");
    const Mechanism pi = make_match_pi(Bipartition{{1}, {2}});
    CHECK(deviation_utility(f1a, pi, 1, {}) == Rat(3));
    CHECK(deviation_utility(f1a, pi, 2, {}) == Rat(3));
    const Mechanism mix = make_mix();
    CHECK(deviation_utility(f1a, mix, 1, {}) == Rat(5, 2));
    CHECK(deviation_utility(f1a, mix, 2, {}) == Rat(5, 2));
}

TEST_CASE("frozen deviation utilities") {
    const LabeledGraph f1a = figure("fig1a");
    const LabeledGraph f3 = figure("fig3");
    CHECK(deviation_utility(f1a, make_match_pi(Bipartition{{1}, {2}}), 1,
                            {5, 6}) == Rat(2));
    CHECK(deviation_utility(f3, make_naive(), 2, {5, 6}) == Rat(6));
    CHECK(deviation_utility(f1a, make_flip(), 1, {5, 6}) == Rat(3));
    CHECK(deviation_utility(f1a, make_mix(), 1, {5, 6}) == Rat(2));
    // Hiding everything: the agent matches internally on its own.
    CHECK(deviation_utility(f1a, make_match_pi(Bipartition{{1}, {2}}), 1,
                            {1, 4, 5, 6}) == Rat(2));
}

TEST_CASE("deviation records replay from their parts") {
    const LabeledGraph f1a = figure("fig1a");
    const LabeledGraph f3 = figure("fig3");
    check_record(f3, make_naive(), 2, {5, 6});
    check_record(f1a, make_match_pi(Bipartition{{1}, {2}}), 1, {5, 6});
    check_record(f1a, make_mix(), 1, {5, 6});
    check_record(f1a, make_flip(), 1, {5, 6});
    check_record(f1a, make_flip(), 2, {});
    check_record(f1a, make_optimal(), 2, {2, 3});
    for (std::uint64_t t = 0; t < 10; ++t) {
        const LabeledGraph g = generate_random(7, 2, 500, 6100 + t);
        for (int agent : {1, 2}) {
            const std::vector<int> mine = g.agent_vertices(agent);
            if (mine.empty()) continue;
            check_record(g, make_mix(), agent, {mine.front()});
            check_record(g, make_match_pi(Bipartition{{2}, {1}}), agent,
                         std::set<int>(mine.begin(), mine.end()));
        }
    }
}

TEST_CASE("deviation details for the serial-rule counterexample") {
    const LabeledGraph f3 = figure("fig3");
    const DeviationRecord rec = deviate(f3, make_naive(), 2, {5, 6});
    REQUIRE(rec.outcomes.size() == 1);
    const DeviationOutcome& o = rec.outcomes[0];
    CHECK(o.probability == Rat(1));
    CHECK(o.first_stage == m_of({{1, 2}, {3, 4}, {7, 8}, {9, 10}}));
    CHECK(o.leftover == std::set<int>{});
    CHECK(o.second_stage == m_of({{5, 6}}));
    CHECK(rec.total_utility == Rat(6));
}

TEST_CASE("sampled mechanisms are rejected") {
    const LabeledGraph f1a = figure("fig1a");
    CHECK_THROWS_AS(
        (void)deviation_utility(f1a, make_mix_sampled(1), 1, {5, 6}),
        InputError);
    CHECK_THROWS_AS((void)deviate(f1a, make_mix_sampled(1), 1, {}),
                    InputError);
    CHECK_THROWS_AS((void)verify_sp(f1a, make_mix_sampled(1)), InputError);
}

TEST_CASE("strategyproofness holds for the bipartition rule and the mixture on the figures") {
    for (const char* name : {"fig1a", "fig1b", "fig1c", "fig5"}) {
        const LabeledGraph g = figure(name);
        CAPTURE(name);
        for (std::uint64_t mask = 0; mask < 4; ++mask)
            CHECK(verify_sp(g, make_match_pi(bipartition_from_mask(2, mask)))
                      .empty());
        CHECK(verify_sp(g, make_mix()).empty());
        CHECK(verify_sp(g, make_flip()).empty());
    }
    for (const char* name : {"fig2", "fig3", "fig3b", "fig6"}) {
        const LabeledGraph g = figure(name);
        CAPTURE(name);
        CHECK(verify_sp(g, make_mix()).empty());
        CHECK(verify_sp(g, make_match_pi(bipartition_from_mask(
                               g.num_agents, 1)))
                  .empty());
    }
}

TEST_CASE("the serial rule's three profitable deviations on the path of ten") {
    const LabeledGraph f3 = figure("fig3");
    const std::vector<Violation> vs = verify_sp(f3, make_naive());
    REQUIRE(vs.size() == 3);
    CHECK(vs[0].agent == 2);
    CHECK(vs[0].hidden == std::set<int>{1, 5, 6});
    CHECK(vs[0].truthful == Rat(4));
    CHECK(vs[0].deviating == Rat(5));
    CHECK(vs[1].agent == 2);
    CHECK(vs[1].hidden == std::set<int>{5, 6});
    CHECK(vs[1].truthful == Rat(4));
    CHECK(vs[1].deviating == Rat(6));
    CHECK(vs[2].agent == 2);
    CHECK(vs[2].hidden == std::set<int>{5, 6, 10});
    CHECK(vs[2].truthful == Rat(4));
    CHECK(vs[2].deviating == Rat(5));
}

TEST_CASE("the canonical optimum invites hiding") {
    const std::vector<Violation> vs =
        verify_sp(figure("fig1a"), make_optimal());
    CHECK(has_violation(vs, 2, {2, 3}, Rat(2), Rat(3)));
    CHECK(std::none_of(vs.begin(), vs.end(),
                       [](const Violation& v) { return v.agent == 1; }));
    for (const Violation& v : vs) CHECK(v.deviating > v.truthful);
}

TEST_CASE("strategyproofness checks refuse oversized instances") {
    const LabeledGraph big = generate_path(17, 2, {});
    CHECK_THROWS_AS(
        (void)verify_sp(big, make_match_pi(Bipartition{{1}, {2}})), SizeError);
    CHECK_NOTHROW(
        (void)verify_sp(generate_path(8, 2, {}), make_match_pi(Bipartition{{1}, {2}})));
}

TEST_CASE("degenerate inputs") {
    LabeledGraph empty;
    CHECK(verify_sp(empty, make_optimal()).empty());
    CHECK(verify_sp(empty, make_naive()).empty());

    // An agent with no vertices has nothing to hide.
    LabeledGraph lop;
    lop.num_agents = 2;
    lop.owners = {{1, 1}, {2, 1}};
    lop.edges = {make_edge(1, 2)};
    CHECK(verify_sp(lop, make_mix()).empty());
    CHECK(deviation_utility(lop, make_mix(), 2, {}) == Rat(0));
}
