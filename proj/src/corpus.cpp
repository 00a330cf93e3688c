#include "mechmatch/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "mechmatch/io.hpp"

namespace mechmatch {

namespace {

// Unordered vertex pairs (i < j) of a k-vertex graph, indexed
// lexicographically; an edge set is a bitmask over these indices.
struct PairTable {
    int k = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> index;

    explicit PairTable(int k_) : k(k_), index(k_, std::vector<int>(k_, -1)) {
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                index[i][j] = index[j][i] = static_cast<int>(pairs.size());
                pairs.push_back({i, j});
            }
    }
};

std::vector<std::vector<int>> all_permutations(int k) {
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Pair-index image of each pair under a vertex permutation.
std::vector<int> pair_permutation(const PairTable& pt,
                                  const std::vector<int>& sigma) {
    std::vector<int> out(pt.pairs.size());
    for (std::size_t p = 0; p < pt.pairs.size(); ++p)
        out[p] = pt.index[sigma[pt.pairs[p].first]][sigma[pt.pairs[p].second]];
    return out;
}

std::uint32_t relabel(std::uint32_t mask, const std::vector<int>& ptab) {
    std::uint32_t out = 0;
    for (std::size_t p = 0; p < ptab.size(); ++p)
        if (mask & (std::uint32_t{1} << p)) out |= std::uint32_t{1} << ptab[p];
    return out;
}

bool connected(int k, std::uint32_t mask, const PairTable& pt) {
    std::vector<int> root(k);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int v) {
        while (root[v] != v) v = root[v] = root[root[v]];
        return v;
    };
    for (std::size_t p = 0; p < pt.pairs.size(); ++p)
        if (mask & (std::uint32_t{1} << p))
            root[find(pt.pairs[p].first)] = find(pt.pairs[p].second);
    for (int v = 1; v < k; ++v)
        if (find(v) != find(0)) return false;
    return true;
}

// One isomorphism class of unlabeled k-vertex graphs: the minimal edge
// bitmask over all vertex permutations, plus its automorphisms.
struct GraphClass {
    std::uint32_t mask = 0;
    std::vector<std::vector<int>> aut;
};

const std::vector<GraphClass>& canonical_graphs(int k, bool connected_only) {
    static std::map<std::pair<int, bool>, std::vector<GraphClass>> cache;
    auto key = std::make_pair(k, connected_only);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PairTable pt(k);
    auto perms = all_permutations(k);
    std::vector<std::vector<int>> ptabs;
    ptabs.reserve(perms.size());
    for (const auto& sigma : perms) ptabs.push_back(pair_permutation(pt, sigma));

    std::vector<GraphClass> out;
    const std::uint32_t top = std::uint32_t{1} << pt.pairs.size();
    for (std::uint32_t mask = 0; mask < top; ++mask) {
        if (connected_only && !connected(k, mask, pt)) continue;
        GraphClass cls;
        cls.mask = mask;
        bool canonical = true;
        for (std::size_t s = 0; s < perms.size(); ++s) {
            std::uint32_t image = relabel(mask, ptabs[s]);
            if (image < mask) {
                canonical = false;
                break;
            }
            if (image == mask) cls.aut.push_back(perms[s]);
        }
        if (canonical) out.push_back(std::move(cls));
    }
    return cache.emplace(key, std::move(out)).first->second;
}

// Is `o` (0-based owner array) lexicographically minimal in its orbit under
// the automorphism group?
bool owners_canonical(const std::vector<int>& o,
                      const std::vector<std::vector<int>>& aut) {
    for (const auto& sigma : aut) {
        for (std::size_t v = 0; v < o.size(); ++v) {
            int image = o[sigma[v]];
            if (image < o[v]) return false;  // o∘sigma precedes o
            if (image > o[v]) break;
        }
    }
    return true;
}

LabeledGraph assemble(int k, std::uint32_t mask, const PairTable& pt,
                      const std::vector<int>& owners, int num_agents) {
    LabeledGraph g;
    g.num_agents = num_agents;
    for (int v = 0; v < k; ++v) g.owners[v + 1] = owners[v];
    for (std::size_t p = 0; p < pt.pairs.size(); ++p)
        if (mask & (std::uint32_t{1} << p))
            g.edges.insert({pt.pairs[p].first + 1, pt.pairs[p].second + 1});
    return g;
}

// Appends every canonical (graph, owner-map) instance for fixed (n, k).
void emit_tier(int num_agents, int k, bool connected_only,
               const std::string& id_prefix,
               std::vector<CorpusInstance>& out) {
    PairTable pt(k);
    const auto& classes = canonical_graphs(k, connected_only);
    for (std::size_t gi = 0; gi < classes.size(); ++gi) {
        const auto& cls = classes[gi];
        std::vector<int> owners(k, 1);
        int oi = 0;
        while (true) {
            if (owners_canonical(owners, cls.aut)) {
                std::string id = id_prefix + "-v" + std::to_string(k) + "-g" +
                                 std::to_string(gi) + "-o" + std::to_string(oi);
                out.push_back(CorpusInstance{
                    std::move(id), assemble(k, cls.mask, pt, owners, num_agents)});
                ++oi;
            }
            // Odometer over owner assignments, most significant digit first.
            int v = k - 1;
            while (v >= 0 && owners[v] == num_agents) owners[v--] = 1;
            if (v < 0) break;
            ++owners[v];
        }
    }
}

}  // namespace

namespace {

// Edge sets are 32-bit masks over vertex pairs: 8 vertices (28 pairs) is a
// hard representation limit, and the permutation scan is already slow there.
void require_enumerable(int max_vertices) {
    if (max_vertices > 8)
        throw SizeError("exhaustive graph enumeration supports at most 8 "
                        "vertices, got " +
                        std::to_string(max_vertices));
}

}  // namespace

std::vector<CorpusInstance> exhaustive_corpus(int max_vertices) {
    require_enumerable(max_vertices);
    std::vector<CorpusInstance> out;
    for (int n : {2, 3})
        for (int k = 1; k <= max_vertices; ++k)
            emit_tier(n, k, true, "exh-n" + std::to_string(n), out);
    return out;
}

std::vector<CorpusInstance> random_corpus(int count) {
    constexpr std::uint64_t kMasterSeed = 1729;
    constexpr int kPermille[3] = {200, 500, 800};
    std::vector<CorpusInstance> out;
    out.reserve(count);
    for (int t = 0; t < count; ++t) {
        int k = 2 + t % 9;
        int n = 2 + (t / 9) % 3;
        int p = kPermille[(t / 27) % 3];
        LabeledGraph g =
            generate_random(k, n, p, splitmix64(kMasterSeed + t));
        char id[16];
        std::snprintf(id, sizeof id, "rnd-%05d", t);
        out.push_back(CorpusInstance{id, std::move(g)});
    }
    return out;
}

std::vector<CorpusInstance> hunt_corpus(int max_vertices) {
    require_enumerable(max_vertices);
    std::vector<CorpusInstance> out;
    for (int k = 1; k <= max_vertices; ++k)
        emit_tier(2, k, false, "hunt", out);
    return out;
}

}  // namespace mechmatch
