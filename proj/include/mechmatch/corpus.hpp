#pragma once

// The versioned instance corpus driving the property suites:
//   exhaustive tier — every connected labeled graph on up to 6 vertices
//     with 2 or 3 agents, one representative per label-preserving
//     isomorphism class (vertex bijections that preserve both adjacency and
//     ownership; agent ids are never permuted);
//   random tier — 10,000 seeded random graphs, up to 10 vertices, up to 4
//     agents, edge probability in {0.2, 0.5, 0.8};
//   hunt tier — every two-agent labeled graph (disconnected included) on up
//     to a given vertex count, for the conjecture search.
// Instance ids and ordering are stable across runs and releases.

#include <cstdint>
#include <string>
#include <vector>

#include "mechmatch/graph.hpp"

namespace mechmatch {

struct CorpusInstance {
    std::string id;
    LabeledGraph graph;
};

// Exhaustive tier, ordered by agent count, then vertex count, then a
// canonical graph index, then a canonical owner-assignment index. Ids look
// like "exh-n2-v5-g12-o3". max_vertices trims the tier for quick test runs;
// both enumerating tiers throw SizeError beyond 8 vertices (edge sets are
// 32-bit pair masks, and the permutation scan is impractical anyway).
std::vector<CorpusInstance> exhaustive_corpus(int max_vertices = 6);

// Random tier: instance t (0-based) uses vertices 2 + (t mod 9), agents
// 2 + ((t/9) mod 3), edge permille {200,500,800}[(t/27) mod 3], and
// generator seed splitmix64(1729 + t). Ids look like "rnd-00042".
std::vector<CorpusInstance> random_corpus(int count = 10000);

// Hunt tier: all two-agent labeled graphs with 1..max_vertices vertices up
// to label-preserving isomorphism, disconnected graphs included (a strict
// superset of the two-agent exhaustive tier). Ids look like
// "hunt-v4-g7-o2".
std::vector<CorpusInstance> hunt_corpus(int max_vertices = 6);

}  // namespace mechmatch
