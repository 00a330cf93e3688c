#pragma once

// Auditing layer: exact approximation-ratio reports, the optimum-vs-
// mechanism dichotomy harness on the three-graph family, the half-witness
// construction behind the 2-approximation bound, maximum-matching
// tie-structure checks, the coin-flip conjecture hunt, and the regression
// fixture suite over the bundled figure graphs.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mechmatch/corpus.hpp"
#include "mechmatch/graph.hpp"
#include "mechmatch/mechanisms.hpp"
#include "mechmatch/strategy.hpp"

namespace mechmatch {

// Exact approximation audit of one mechanism on one graph. The ratio
// opt / E[|f(G)|] is undefined when the graph has no matching at all
// (opt = 0) and infinite when a nonempty optimum faces an always-empty
// mechanism output.
struct ApproxReport {
    enum class Kind { finite, infinite, undefined };

    Kind kind = Kind::undefined;
    int opt_size = 0;
    Rat expected;             // E[|f(G)|], exact
    std::optional<Rat> ratio; // set iff kind == finite
};

ApproxReport approx_ratio(const LabeledGraph& g, const Mechanism& mechanism);

// The 2-approximation proof object: m_double_star unions each agent's
// canonical internal maximum matching; m_prime is rebuilt from the
// symmetric difference with the canonical optimum, taking for each
// alternating component whichever side has more internal edges (ties keep
// the optimum's side). Postconditions, checked on construction:
// |M'_ii| = nu_i for every agent, and
//   sum_i |M'_ii| + 1/2 sum_{i<j} |M'_ij|
//     >= sum_i |M*_ii| + 1/2 sum_{i<j} |M*_ij|.
struct HalfWitness {
    Matching m_star;
    Matching m_double_star;
    Matching m_prime;
};

HalfWitness construct_half_witness(const LabeledGraph& g);

// Internal count plus half the external count of a matching — the quantity
// the half-witness inequality compares.
Rat internal_plus_half_external(const LabeledGraph& g, const Matching& m);

// Dichotomy harness on the bundled three-graph family (the 7-vertex
// two-agent path and its two hidden-subset reductions): every deterministic
// mechanism either admits a strict-gain deviation on the full path (probed
// at agent 1 hiding {5,6} and agent 2 hiding {2,3}) or returns a matching
// at most half the optimum on one of the reduced graphs. Throws Error if
// neither horn holds (the supporting argument rules that out).
struct DichotomyReport {
    bool violation_horn = false;
    std::optional<Violation> violation;  // set iff violation_horn
    bool ratio_horn = false;
    std::string ratio_graph;  // "fig1b" or "fig1c" when ratio_horn
    std::string detail;
};

DichotomyReport theorem1_dichotomy(const Mechanism& mechanism);

// Two maximum-cardinality matchings with equal total internal edge count
// but different utility vectors. Equal sizes and equal totals force equal
// cross counts, but the per-agent internal split can still differ — even
// with two agents, where the smallest such pairs live on six vertices.
struct TiePair {
    Matching m1, m2;
    UtilityVector u1, u2;
};

// Scans all maximum matchings (canonical ascending order), grouping by
// total internal count, and returns the first utility-vector mismatch
// within a group. Oracle-scale only.
std::optional<TiePair> tie_counterexample(const LabeledGraph& g);

// Two-agent specialization: true = every equal-internal-total group of
// maximum matchings shares one utility vector. This is a checkable claim,
// not a theorem: it holds for every two-agent graph up to five vertices
// but fails from six up, where the symmetric difference of two maxima can
// be two alternating paths that trade an internal edge of one agent for an
// internal edge of the other. Restricted to the maximum-internal-total
// group (the ties the two-agent coin flip actually breaks) no failure has
// ever been observed. Throws InputError unless num_agents == 2.
bool lemma_two_agent_tie(const LabeledGraph& g);

// Three-agent companion: the counterexample pair, if any. Throws
// InputError unless num_agents == 3.
std::optional<TiePair> lemma_counterexample_n3(const LabeledGraph& g);

// Exhaustive-plus-random search for a strategyproofness violation of the
// two-agent coin-flip mechanism. Every candidate violation is re-verified
// through the brute-force reference route before being reported; a
// confirmed certificate would be a genuine finding, not a test failure.
struct HuntParams {
    int exhaustive_max_vertices = 6;
    int random_count = 0;
    int random_max_vertices = 8;
    std::uint64_t seed = 1729;
};

struct HuntCertificate {
    std::string instance_id;
    LabeledGraph graph;
    Violation violation;
};

struct HuntResult {
    long long instances_checked = 0;
    std::vector<HuntCertificate> certificates;
};

HuntResult hunt_flip_sp(const HuntParams& params);

// Regression suite over the bundled figure graphs: every quoted worked
// example as one named pass/fail check.
struct FixtureResult {
    std::string name;
    bool passed = false;
    std::string detail;  // failure explanation, empty when passed
};

std::vector<FixtureResult> fixtures();

// Runs fn(0..count-1) across a small thread pool (or inline when the
// hardware offers a single core). Callers keep determinism by writing to
// slot-indexed storage.
void parallel_sweep(std::size_t count,
                    const std::function<void(std::size_t)>& fn);

}  // namespace mechmatch
