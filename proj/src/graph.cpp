#include "mechmatch/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace mechmatch {

int oracle_bound() {
    static const int bound = [] {
        const char* env = std::getenv("MECHMATCH_ORACLE_BOUND");
        if (env == nullptr || *env == '\0') return 16;
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == nullptr || *end != '\0' || v <= 0 || v > 1000000)
            throw InputError(
                "MECHMATCH_ORACLE_BOUND must be a positive integer, got \"" +
                std::string(env) + "\"");
        return static_cast<int>(v);
    }();
    return bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int LabeledGraph::owner(int v) const {
    auto it = owners.find(v);
    if (it == owners.end())
        throw InputError("unknown vertex id " + std::to_string(v));
    return it->second;
}

std::vector<int> LabeledGraph::agent_vertices(int agent) const {
    if (agent < 1 || agent > num_agents)
        throw InputError("unknown agent id " + std::to_string(agent));
    std::vector<int> out;
    for (const auto& [v, a] : owners)
        if (a == agent) out.push_back(v);
    return out;
}

std::vector<int> LabeledGraph::vertex_ids() const {
    std::vector<int> out;
    out.reserve(owners.size());
    for (const auto& [v, a] : owners) out.push_back(v);
    return out;
}

std::set<int> Matching::covered_vertices() const {
    std::set<int> out;
    for (const auto& [u, v] : edges) {
        out.insert(u);
        out.insert(v);
    }
    return out;
}

int PartitionCounts::at(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 1 || j > num_agents)
        throw InputError("agent pair out of range");
    return counts[i - 1][j - 1];
}

int PartitionCounts::total() const {
    int s = 0;
    for (int i = 1; i <= num_agents; ++i)
        for (int j = i; j <= num_agents; ++j) s += counts[i - 1][j - 1];
    return s;
}

int PartitionCounts::internal_total() const {
    int s = 0;
    for (int i = 1; i <= num_agents; ++i) s += counts[i - 1][i - 1];
    return s;
}

std::vector<Edge> AlternatingWalk::walk_edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        out.push_back(make_edge(vertices[i], vertices[i + 1]));
    if (is_cycle && vertices.size() >= 2)
        out.push_back(make_edge(vertices.back(), vertices.front()));
    return out;
}

std::vector<std::string> validate(const LabeledGraph& g) {
    std::vector<std::string> out;
    if (g.num_agents < 1)
        out.push_back("num_agents must be at least 1, got " +
                      std::to_string(g.num_agents));
    for (const auto& [v, a] : g.owners)
        if (a < 1 || a > g.num_agents)
            out.push_back("vertex " + std::to_string(v) + ": owner " +
                          std::to_string(a) + " out of range 1.." +
                          std::to_string(g.num_agents));
    for (const auto& [u, v] : g.edges) {
        if (u == v) {
            out.push_back("self-loop at vertex " + std::to_string(u));
            continue;
        }
        if (!g.has_vertex(u))
            out.push_back("edge (" + std::to_string(u) + "," +
                          std::to_string(v) + "): endpoint " +
                          std::to_string(u) + " is not a declared vertex");
        if (!g.has_vertex(v))
            out.push_back("edge (" + std::to_string(u) + "," +
                          std::to_string(v) + "): endpoint " +
                          std::to_string(v) + " is not a declared vertex");
    }
    return out;
}

void require_valid(const LabeledGraph& g) {
    auto violations = validate(g);
    if (!violations.empty())
        throw InputError("invalid graph: " + violations.front());
}

void require_matching(const LabeledGraph& g, const Matching& m) {
    std::set<int> seen;
    for (const auto& e : m.edges) {
        if (g.edges.count(e) == 0)
            throw InputError("matching edge (" + std::to_string(e.first) +
                             "," + std::to_string(e.second) +
                             ") is not an edge of the graph");
        if (!seen.insert(e.first).second || !seen.insert(e.second).second)
            throw InputError("matching covers a vertex twice");
    }
}

LabeledGraph induced_subgraph(const LabeledGraph& g, const std::set<int>& keep) {
    LabeledGraph out;
    out.num_agents = g.num_agents;
    for (int v : keep) {
        auto it = g.owners.find(v);
        if (it == g.owners.end())
            throw InputError("induced_subgraph: unknown vertex id " +
                             std::to_string(v));
        out.owners.emplace(v, it->second);
    }
    for (const auto& e : g.edges)
        if (keep.count(e.first) && keep.count(e.second)) out.edges.insert(e);
    return out;
}

int utility(const LabeledGraph& g, const Matching& m, int agent) {
    if (agent < 1 || agent > g.num_agents)
        throw InputError("unknown agent id " + std::to_string(agent));
    require_matching(g, m);
    int count = 0;
    for (const auto& [u, v] : m.edges) {
        if (g.owner(u) == agent) ++count;
        if (g.owner(v) == agent) ++count;
    }
    return count;
}

UtilityVector utilities(const LabeledGraph& g, const Matching& m) {
    require_matching(g, m);
    UtilityVector u(g.num_agents, 0);
    for (const auto& [a, b] : m.edges) {
        ++u[g.owner(a) - 1];
        ++u[g.owner(b) - 1];
    }
    return u;
}

PartitionCounts partition_counts(const LabeledGraph& g, const Matching& m) {
    require_matching(g, m);
    PartitionCounts pc;
    pc.num_agents = g.num_agents;
    pc.counts.assign(g.num_agents, std::vector<int>(g.num_agents, 0));
    for (const auto& [u, v] : m.edges) {
        int i = g.owner(u), j = g.owner(v);
        if (i > j) std::swap(i, j);
        ++pc.counts[i - 1][j - 1];
    }
    return pc;
}

AlternatingDecomposition symmetric_difference(const LabeledGraph& g,
                                              const Matching& a,
                                              const Matching& b) {
    require_matching(g, a);
    require_matching(g, b);

    // Edges in exactly one of the two matchings; each vertex has degree <= 2
    // here (at most one edge from each side), so components are paths/cycles.
    std::set<Edge> delta;
    for (const auto& e : a.edges)
        if (!b.contains(e)) delta.insert(e);
    for (const auto& e : b.edges)
        if (!a.contains(e)) delta.insert(e);

    std::map<int, std::vector<int>> adj;
    for (const auto& [u, v] : delta) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& [v, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());

    AlternatingDecomposition out;
    std::set<int> visited;

    auto walk_from = [&](int start, int next) {
        std::vector<int> path{start};
        visited.insert(start);
        int prev = start, cur = next;
        while (visited.insert(cur).second) {
            path.push_back(cur);
            const auto& nbrs = adj[cur];
            int nxt = -1;
            for (int w : nbrs)
                if (w != prev) nxt = w;
            if (nxt == -1 || visited.count(nxt)) {
                // Either a path end or we closed a cycle back to `start`.
                if (nxt == start) return std::pair{path, true};
                return std::pair{path, false};
            }
            prev = cur;
            cur = nxt;
        }
        return std::pair{path, false};
    };

    // Paths first: scanning ids ascending over degree-1 vertices reaches
    // each path through its smaller endpoint.
    for (const auto& [v, nbrs] : adj) {
        if (nbrs.size() != 1 || visited.count(v)) continue;
        auto [path, is_cycle] = walk_from(v, nbrs[0]);
        out.components.push_back({path, is_cycle});
    }
    // Everything left is a cycle; start it at its smallest vertex, heading
    // toward that vertex's smaller neighbor.
    for (const auto& [v, nbrs] : adj) {
        if (visited.count(v)) continue;
        auto [path, is_cycle] = walk_from(v, nbrs[0]);
        out.components.push_back({path, is_cycle});
    }
    // Two passes can interleave discovery order; restore smallest-vertex
    // component order.
    std::sort(out.components.begin(), out.components.end(),
              [](const AlternatingWalk& x, const AlternatingWalk& y) {
                  return *std::min_element(x.vertices.begin(), x.vertices.end()) <
                         *std::min_element(y.vertices.begin(), y.vertices.end());
              });
    return out;
}

std::string format_matching(const Matching& m) {
    std::string s = "{";
    bool first = true;
    for (const Edge& e : m.edges) {
        if (!first) s += ",";
        first = false;
        s += "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
    }
    return s + "}";
}

std::string format_utilities(const UtilityVector& u) {
    std::string s = "(";
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(u[i]);
    }
    return s + ")";
}

std::string format_vertex_set(const std::set<int>& s) {
    std::string out = "{";
    bool first = true;
    for (int v : s) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(v);
    }
    return out + "}";
}

std::string format_rat(const Rat& r) {
    const Int num = boost::multiprecision::numerator(r);
    const Int den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace mechmatch
