#include "mechmatch/strategy.hpp"

#include <algorithm>

namespace mechmatch {

namespace {

void check_hidden(const LabeledGraph& g, int agent, const std::set<int>& hidden) {
    auto verts = g.agent_vertices(agent);  // validates the agent id
    for (int v : hidden)
        if (!std::binary_search(verts.begin(), verts.end(), v))
            throw InputError("hidden vertex " + std::to_string(v) +
                             " is not owned by agent " + std::to_string(agent));
}

void check_exact(const Mechanism& mechanism) {
    if (!mechanism.exact)
        throw InputError("mechanism \"" + mechanism.name +
                         "\" has sampled outcomes; deviation utilities need "
                         "the exact distribution");
}

std::set<int> retained_vertices(const LabeledGraph& g,
                                const std::set<int>& hidden) {
    std::set<int> keep;
    for (int v : g.vertex_ids())
        if (!hidden.count(v)) keep.insert(v);
    return keep;
}

// X: the agent's vertices visible to the mechanism but left unmatched.
std::set<int> leftover_vertices(const LabeledGraph& reduced, int agent,
                                const Matching& first_stage) {
    std::set<int> covered = first_stage.covered_vertices();
    std::set<int> out;
    for (int v : reduced.agent_vertices(agent))
        if (!covered.count(v)) out.insert(v);
    return out;
}

LabeledGraph second_stage_graph(const LabeledGraph& g,
                                const std::set<int>& hidden,
                                const std::set<int>& leftover) {
    std::set<int> pool = hidden;
    pool.insert(leftover.begin(), leftover.end());
    return induced_subgraph(g, pool);
}

}  // namespace

Matching second_stage(const LabeledGraph& g, int agent,
                      const std::set<int>& hidden,
                      const Matching& first_stage) {
    require_valid(g);
    check_hidden(g, agent, hidden);
    LabeledGraph reduced = induced_subgraph(g, retained_vertices(g, hidden));
    require_matching(reduced, first_stage);
    std::set<int> leftover = leftover_vertices(reduced, agent, first_stage);
    return max_cardinality_matching(second_stage_graph(g, hidden, leftover));
}

Rat deviation_utility(const LabeledGraph& g, const Mechanism& mechanism,
                      int agent, const std::set<int>& hidden) {
    require_valid(g);
    check_hidden(g, agent, hidden);
    check_exact(mechanism);
    LabeledGraph reduced = induced_subgraph(g, retained_vertices(g, hidden));
    OutcomeDistribution dist = mechanism.run(reduced);
    Rat total(0);
    for (const auto& o : dist.outcomes) {
        int first = utility(reduced, o.matching, agent);
        std::set<int> leftover = leftover_vertices(reduced, agent, o.matching);
        int second = max_matching_size(second_stage_graph(g, hidden, leftover));
        total += o.probability * Rat(first + 2 * second);
    }
    return total;
}

DeviationRecord deviate(const LabeledGraph& g, const Mechanism& mechanism,
                        int agent, const std::set<int>& hidden) {
    require_valid(g);
    check_hidden(g, agent, hidden);
    check_exact(mechanism);
    LabeledGraph reduced = induced_subgraph(g, retained_vertices(g, hidden));
    OutcomeDistribution dist = mechanism.run(reduced);
    DeviationRecord rec;
    rec.agent = agent;
    rec.hidden = hidden;
    rec.total_utility = Rat(0);
    for (const auto& o : dist.outcomes) {
        DeviationOutcome out;
        out.probability = o.probability;
        out.first_stage = o.matching;
        out.leftover = leftover_vertices(reduced, agent, o.matching);
        out.second_stage = max_cardinality_matching(
            second_stage_graph(g, hidden, out.leftover));
        int first = utility(reduced, o.matching, agent);
        rec.total_utility +=
            o.probability * Rat(first + 2 * out.second_stage.size());
        rec.outcomes.push_back(std::move(out));
    }
    return rec;
}

std::vector<Violation> verify_sp(const LabeledGraph& g,
                                 const Mechanism& mechanism) {
    require_valid(g);
    check_exact(mechanism);
    if (g.num_vertices() > oracle_bound())
        throw SizeError("strategyproofness check enumerates hide-sets; "
                        "instance has " +
                        std::to_string(g.num_vertices()) +
                        " vertices, above the oracle bound of " +
                        std::to_string(oracle_bound()));
    std::vector<Rat> truthful = expected_utilities(g, mechanism.run(g));

    std::vector<Violation> found;
    for (int agent = 1; agent <= g.num_agents; ++agent) {
        std::vector<int> verts = g.agent_vertices(agent);
        std::set<int> hidden;
        // Lexicographic subset order: emit after each inclusion, recursing
        // before moving to the next start element.
        auto sweep = [&](auto&& self, std::size_t from) -> void {
            for (std::size_t i = from; i < verts.size(); ++i) {
                hidden.insert(verts[i]);
                Rat dev = deviation_utility(g, mechanism, agent, hidden);
                if (dev > truthful[agent - 1])
                    found.push_back(
                        Violation{agent, hidden, truthful[agent - 1], dev});
                self(self, i + 1);
                hidden.erase(verts[i]);
            }
        };
        sweep(sweep, 0);
    }
    return found;
}

}  // namespace mechmatch
