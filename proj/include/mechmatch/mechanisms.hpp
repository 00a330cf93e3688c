#pragma once

// The matching mechanisms: the bipartition-parameterized internally-
// constrained rule (weight-reduction and brute-force reference forms), its
// uniform randomization over all labeled bipartitions, the two-agent
// coin-flip variant, the canonical-optimum mechanism, and the serial
// internally-constrained rule without a bipartition (a known-manipulable
// negative control).

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mechmatch/graph.hpp"
#include "mechmatch/solvers.hpp"

namespace mechmatch {

// Two-sided split of the agent set 1..n. Sides may be empty; every agent
// appears in exactly one side. (side1, side2) and (side2, side1) are
// distinct: they induce the same feasible set but different tie-breaking
// priority, and the randomized mixture treats them as separate coin
// outcomes.
struct Bipartition {
    std::set<int> side1;
    std::set<int> side2;

    bool operator==(const Bipartition&) const = default;
};

// Bipartition encoded by an n-bit mask: agent i joins side 1 iff bit (i-1)
// is clear. Mask 0 puts everyone in side 1.
Bipartition bipartition_from_mask(int num_agents, std::uint64_t mask);
std::uint64_t bipartition_mask(const Bipartition& pi);

// Text form used by the CLI and the results CSV: side-1 agent ids
// comma-separated ascending ("1,3"), or "-" when side 1 is empty.
std::string bipartition_text(const Bipartition& pi);
Bipartition parse_bipartition(const std::string& text, int num_agents);

// Throws InputError unless pi covers agents 1..g.num_agents exactly once.
void require_bipartition(const LabeledGraph& g, const Bipartition& pi);

// Serial tie-breaking priority: side-1 agents ascending by id, then side-2
// agents ascending by id. A permutation of 1..n.
std::vector<int> priority_order(const Bipartition& pi);

// One possible result of a randomized mechanism.
struct Outcome {
    Rat probability;
    Matching matching;
};

// Finite exact probability distribution over matchings of one input graph.
// Probabilities are dyadic (coin-flip denominators) and sum to exactly 1.
// Deterministic mechanisms are wrapped as a single outcome of probability 1.
struct OutcomeDistribution {
    std::vector<Outcome> outcomes;
};

Rat expected_size(const OutcomeDistribution& d);
std::vector<Rat> expected_utilities(const LabeledGraph& g,
                                    const OutcomeDistribution& d);

// Feasibility under the bipartition rule: every agent's internal edge count
// |M_ii| equals nu_i (that agent's maximum internal matching size on the
// input graph), and no matching edge joins two different agents on the same
// side.
bool is_feasible(const LabeledGraph& g, const Matching& m,
                 const Bipartition& pi);

// Brute-force reference rule: among feasible matchings, maximum cardinality
// first, then lexicographically maximal utility vector in priority order,
// then lexicographically minimal sorted edge list. Enumerates every
// matching; throws SizeError above oracle_bound() vertices.
Matching match_pi_reference(const LabeledGraph& g, const Bipartition& pi);

// The polynomial-time weight reduction, scaled to exact integers. With
// m = |E| of the input graph, n agents, and S = m^(2n+2):
//   internal edge of agent i             ->  (m+3) * S
//   cross edge, owner i side 1, j side 2 ->  S + m^(2n+1-i) + m^(n-j)
//   cross edge within one side           ->  omitted (deleted, not weight 0)
// The exponent forms are S/m^(i+1) and S/m^(j+n+2) cleared to integers.
// Requires m >= 2 (smaller instances bypass the reduction, see match_pi);
// throws InputError for m <= 1.
WeightAssignment match_pi_weights(const LabeledGraph& g, const Bipartition& pi);

// Polynomial-time form of the bipartition rule: one maximum-weight solve
// over the reduced graph (same-side cross edges deleted), canonicalized to
// the lexicographically smallest sorted edge list among weight-tied optima.
// Agrees with match_pi_reference edge-for-edge on oracle-scale instances.
// Instances with |E| <= 1 are resolved directly.
Matching match_pi(const LabeledGraph& g, const Bipartition& pi);

// Mode selector for the randomized mixture: exact enumeration of all 2^n
// bipartitions, or one bipartition drawn from a seeded generator.
struct MixMode {
    bool is_exact = true;
    std::uint64_t seed = 0;
};

inline MixMode mix_exact() { return MixMode{}; }
inline MixMode mix_sampled(std::uint64_t seed) { return MixMode{false, seed}; }

// Fair independent coin per agent: exact mode returns all 2^n labeled
// bipartitions in ascending mask order, each with probability 2^-n, paired
// with match_pi under that bipartition (no deduplication). Sampled mode
// draws the mask from the low n bits of the first output of a
// std::mt19937_64 seeded with mode.seed and returns a single outcome of
// probability 1. Exact mode throws SizeError when n > max_exact_agents.
OutcomeDistribution mix_and_match(const LabeledGraph& g,
                                  const MixMode& mode = MixMode{},
                                  int max_exact_agents = 20);

// Two-agent coin flip: probability 1/2 on match_pi(g, ({1},{2})), and 1/2
// on the maximum-cardinality matching that first maximizes the total number
// of internal edges and is then canonicalized (lexicographically smallest
// sorted edge list). Outcomes listed in that order. Throws InputError
// unless the graph has exactly 2 agents.
OutcomeDistribution flip_and_match(const LabeledGraph& g);

// Canonical maximum-cardinality matching, exposed under the mechanism
// interface so the deviation harnesses can drive it.
Matching optimal_mechanism(const LabeledGraph& g);

// Serial internally-constrained rule without a bipartition: maximum
// cardinality among matchings with |M_ii| = nu_i for every agent, serial
// tie-break by ascending agent id, canonical edge-list tie-break last.
// Brute force; throws SizeError above oracle_bound() vertices.
Matching naive_serial(const LabeledGraph& g);

// Uniform wrapper so the deviation engine and the audits can treat every
// mechanism alike. Deterministic mechanisms run as single-outcome
// distributions. `exact` is false only for sampled randomized modes, which
// the strategyproofness verifier refuses.
struct Mechanism {
    std::string name;
    bool deterministic = true;
    bool exact = true;
    std::optional<Bipartition> bipartition;
    std::optional<std::uint64_t> seed;
    std::function<OutcomeDistribution(const LabeledGraph&)> run;
};

Mechanism make_match_pi(const Bipartition& pi);
Mechanism make_match_pi_reference(const Bipartition& pi);
Mechanism make_mix();
Mechanism make_mix_sampled(std::uint64_t seed);
Mechanism make_flip();
Mechanism make_optimal();
Mechanism make_naive();

}  // namespace mechmatch
