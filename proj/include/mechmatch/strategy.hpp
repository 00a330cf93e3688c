#pragma once

// The deviation model: an agent hides a subset of its vertices, the
// mechanism runs on the reduced graph, and the agent then internally
// matches its hidden vertices together with whatever the mechanism left
// unmatched. Utilities are exact rationals so strategyproofness comparisons
// have zero tolerance.

#include <set>
#include <vector>

#include "mechmatch/graph.hpp"
#include "mechmatch/mechanisms.hpp"

namespace mechmatch {

// One realized first-stage outcome of a deviation, with the agent's
// leftover vertices X (its vertices the mechanism left unmatched) and the
// second-stage matching on hidden + leftover.
struct DeviationOutcome {
    Rat probability;
    Matching first_stage;
    std::set<int> leftover;
    Matching second_stage;
};

// Full account of one deviation. total_utility equals
// sum over outcomes of p * (first-stage utility + 2 * |second stage|):
// second-stage edges are internal, matching two of the agent's vertices
// each.
struct DeviationRecord {
    int agent = 0;
    std::set<int> hidden;
    std::vector<DeviationOutcome> outcomes;
    Rat total_utility;
};

// A strict-gain deviation found by verify_sp.
struct Violation {
    int agent = 0;
    std::set<int> hidden;
    Rat truthful;
    Rat deviating;
};

// Maximum-cardinality matching (canonical) of the subgraph induced by the
// hidden vertices plus the agent's vertices unmatched by first_stage.
// first_stage must be a valid matching on g minus the hidden vertices.
// Throws InputError if hidden is not a subset of the agent's vertices.
Matching second_stage(const LabeledGraph& g, int agent,
                      const std::set<int>& hidden,
                      const Matching& first_stage);

// Exact expected utility of `agent` hiding `hidden` (possibly empty) under
// the mechanism: expectation over first-stage outcomes of first-stage
// utility plus twice the second-stage matching size. Requires an
// exact-mode mechanism; sampled modes throw InputError. hidden = {} equals
// the truthful utility.
Rat deviation_utility(const LabeledGraph& g, const Mechanism& mechanism,
                      int agent, const std::set<int>& hidden);

// Like deviation_utility but materializes every outcome (canonical
// second-stage matchings and leftover sets) for reporting.
DeviationRecord deviate(const LabeledGraph& g, const Mechanism& mechanism,
                        int agent, const std::set<int>& hidden);

// Exhaustive single-agent strategyproofness check: enumerates every
// nonempty hide-set of every agent (lexicographic subset order within each
// agent, agents ascending) and reports each strict gain. An empty result
// certifies strategyproofness on this instance; hiding everything doubles
// as the individual-rationality check. Requires an exact-mode mechanism and
// at most oracle_bound() vertices (SizeError above).
std::vector<Violation> verify_sp(const LabeledGraph& g,
                                 const Mechanism& mechanism);

}  // namespace mechmatch
