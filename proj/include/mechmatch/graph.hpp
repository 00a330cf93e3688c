#pragma once

// Core domain types: agent-labeled graphs, matchings, utilities, and the
// symmetric-difference decomposition into alternating paths/cycles.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mechmatch/common.hpp"

namespace mechmatch {

// Undirected edge, stored with endpoints in ascending order (see make_edge).
using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) {
    return u <= v ? Edge{u, v} : Edge{v, u};
}

// Undirected graph whose vertices each belong to exactly one agent.
// Vertex ids are arbitrary positive integers and stay stable under induced
// subgraphs, so hand-written fixtures keep their numbering. Agents are
// numbered 1..num_agents and may own zero vertices.
struct LabeledGraph {
    int num_agents = 1;
    std::map<int, int> owners;  // vertex id -> agent id
    std::set<Edge> edges;       // normalized (u < v) pairs

    bool has_vertex(int v) const { return owners.count(v) != 0; }

    // Owner of vertex v; throws InputError for unknown ids.
    int owner(int v) const;

    // Vertices owned by the given agent, ascending. Throws InputError for
    // agent ids outside 1..num_agents.
    std::vector<int> agent_vertices(int agent) const;

    std::vector<int> vertex_ids() const;
    int num_vertices() const { return static_cast<int>(owners.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }

    bool operator==(const LabeledGraph&) const = default;
};

// Conflict-free subset of a graph's edges.
struct Matching {
    std::set<Edge> edges;

    int size() const { return static_cast<int>(edges.size()); }
    bool contains(const Edge& e) const { return edges.count(e) != 0; }

    // Vertices touched by some matching edge.
    std::set<int> covered_vertices() const;

    bool operator==(const Matching&) const = default;
    auto operator<=>(const Matching&) const = default;
};

// Per-agent matched-vertex counts, indexed by agent id - 1.
using UtilityVector = std::vector<int>;

// Counts |M_ij| of matching edges joining agent i's and agent j's vertices,
// stored once per unordered agent pair.
struct PartitionCounts {
    int num_agents = 0;
    std::vector<std::vector<int>> counts;  // counts[i-1][j-1], i <= j

    int at(int i, int j) const;
    int total() const;           // sum over i <= j, equals |M|
    int internal_total() const;  // sum of the diagonal
};

// One path or cycle of a symmetric difference of two matchings. For a path,
// `vertices` lists its vertices in order (consecutive pairs are edges). For
// a cycle, the closing edge (vertices.back(), vertices.front()) is implied.
struct AlternatingWalk {
    std::vector<int> vertices;
    bool is_cycle = false;

    std::vector<Edge> walk_edges() const;
};

// Vertex-disjoint decomposition of M Delta M'. Consecutive edges of each
// walk alternate between the two source matchings; cycles have even length.
struct AlternatingDecomposition {
    std::vector<AlternatingWalk> components;
};

// Returns one human-readable message per violated graph invariant
// (self-loops, undeclared endpoints, owners out of range, num_agents < 1).
// An empty list means the graph is valid.
std::vector<std::string> validate(const LabeledGraph& g);

// Throws InputError if validate(g) reports anything.
void require_valid(const LabeledGraph& g);

// Throws InputError unless m is a valid matching on g: every edge present
// in g and no vertex covered twice.
void require_matching(const LabeledGraph& g, const Matching& m);

// Subgraph induced by `keep`: those vertices, their owners, and every edge
// with both endpoints kept. Ids and num_agents are preserved. Throws
// InputError if `keep` mentions an unknown vertex.
LabeledGraph induced_subgraph(const LabeledGraph& g, const std::set<int>& keep);

// Number of `agent`'s vertices matched by m.
int utility(const LabeledGraph& g, const Matching& m, int agent);

// All agents' matched-vertex counts. Satisfies sum u_i = 2|M| and
// u_i = 2|M_ii| + sum_{j != i} |M_ij|.
UtilityVector utilities(const LabeledGraph& g, const Matching& m);

PartitionCounts partition_counts(const LabeledGraph& g, const Matching& m);

// Decomposes A Delta B into alternating paths and cycles. Components are
// ordered by their smallest vertex; paths start at their smaller endpoint,
// cycles at their smallest vertex heading toward its smaller neighbor.
AlternatingDecomposition symmetric_difference(const LabeledGraph& g,
                                              const Matching& a,
                                              const Matching& b);

// Display helpers shared by the CLI and audit reports.
std::string format_matching(const Matching& m);        // "{(2,3),(4,5)}"
std::string format_utilities(const UtilityVector& u);  // "(3,2,1)"
std::string format_vertex_set(const std::set<int>& s); // "{5,6}"
std::string format_rat(const Rat& r);                  // "4" or "5/2"

}  // namespace mechmatch
