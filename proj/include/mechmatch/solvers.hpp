#pragma once

// Exact matching solvers: maximum cardinality (augmenting-path blossom
// search), maximum weight (primal-dual blossom with arbitrary-precision
// integer weights), exhaustive enumeration for oracle-scale instances, and
// per-agent internal matching sizes.
//
// Canonical outputs: whenever several matchings are optimal, the returned
// one has the lexicographically smallest sorted edge list (comparing edge
// sequences element-wise, a proper prefix ranking before its extensions).
// This makes every solver a pure function of its input.

#include <functional>
#include <map>
#include <vector>

#include "mechmatch/graph.hpp"

namespace mechmatch {

// Non-negative arbitrary-precision weight per edge. Edges of the graph that
// are absent from the map weigh zero; mapped edges must exist in the graph.
using WeightAssignment = std::map<Edge, Int>;

// Canonical maximum-cardinality matching. O(|V|^3) per augmenting-path
// search; canonicalization re-runs the search once per edge prefix, so the
// whole call is O(|E| |V|^3) worst case.
Matching max_cardinality_matching(const LabeledGraph& g);

// Size of a maximum matching, without canonicalization: one O(|V|^3)
// search. Use this for value-only queries on hot paths.
int max_matching_size(const LabeledGraph& g);

// Canonical maximum-weight matching under exact integer arithmetic. Among
// equal-weight optima (including prefix situations created by zero-weight
// edges) returns the lexicographically smallest sorted edge list.
Matching max_weight_matching(const LabeledGraph& g, const WeightAssignment& w);

// Every maximum-cardinality matching, ascending by sorted edge list.
// Requires |V| <= oracle_bound(); throws SizeError beyond it.
std::vector<Matching> enumerate_maximum_matchings(const LabeledGraph& g);

// nu_i: size of a maximum matching of the subgraph induced by agent i's
// vertices. Throws InputError for unknown agents.
int max_internal_matching_size(const LabeledGraph& g, int agent);

// Calls fn once per matching of g (the empty matching included), in
// ascending order of sorted edge list among equal sizes. No size guard:
// callers are responsible for keeping instances enumerable.
void for_each_matching(const LabeledGraph& g,
                       const std::function<void(const std::vector<Edge>&)>& fn);

namespace detail {

// One primal-dual solve over explicit weights. Returns some maximum-weight
// matching: which one is unspecified unless the optimum is unique, so
// callers either make weights injective over candidate matchings or use
// max_weight_value() and canonicalize separately. The returned matching is
// certified against the final dual solution; a certificate failure throws
// Error.
Matching solve_max_weight_once(const LabeledGraph& g, const WeightAssignment& w);

// Total weight of a maximum-weight matching of g under w.
Int max_weight_value(const LabeledGraph& g, const WeightAssignment& w);

}  // namespace detail

}  // namespace mechmatch
