#include "mechmatch/mechanisms.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <utility>

namespace mechmatch {

namespace {

using boost::multiprecision::pow;

std::vector<int> side_table(int num_agents, const Bipartition& pi) {
    std::vector<int> side(num_agents + 1, 0);
    for (int a : pi.side1) side[a] = 1;
    for (int a : pi.side2) side[a] = 2;
    return side;
}

// Shared engine for the brute-force rules: maximum cardinality among
// matchings realizing every agent's internal maximum (and, when `side` is
// given, containing no same-side cross edge), tie-broken by the utility
// vector in `order`, then by first appearance, which among equal-size
// matchings is ascending sorted-edge-list order.
Matching constrained_search(const LabeledGraph& g, const std::vector<int>* side,
                            const std::vector<int>& order) {
    const int n = g.num_agents;
    std::vector<int> nu(n + 1, 0);
    for (int a = 1; a <= n; ++a) nu[a] = max_internal_matching_size(g, a);
    std::map<Edge, std::pair<int, int>> eowners;
    for (const auto& e : g.edges)
        eowners.emplace(e, std::pair<int, int>{g.owner(e.first), g.owner(e.second)});

    bool have = false;
    std::vector<Edge> best;
    std::vector<int> bestu;
    for_each_matching(g, [&](const std::vector<Edge>& m) {
        std::vector<int> internal(n + 1, 0), util(n + 1, 0);
        for (const auto& e : m) {
            const auto& [i, j] = eowners.find(e)->second;
            if (i == j) {
                ++internal[i];
                util[i] += 2;
            } else {
                if (side && (*side)[i] == (*side)[j]) return;
                ++util[i];
                ++util[j];
            }
        }
        for (int a = 1; a <= n; ++a)
            if (internal[a] != nu[a]) return;
        if (have) {
            if (m.size() < best.size()) return;
            if (m.size() == best.size()) {
                int cmp = 0;
                for (int a : order)
                    if (util[a] != bestu[a]) {
                        cmp = util[a] > bestu[a] ? 1 : -1;
                        break;
                    }
                if (cmp <= 0) return;
            }
        }
        have = true;
        best = m;
        bestu = util;
    });
    // The union of per-agent internal maxima is always feasible, so the
    // search cannot come up empty.
    if (!have) throw Error("constrained search found no feasible matching");
    return Matching{std::set<Edge>(best.begin(), best.end())};
}

}  // namespace

Bipartition bipartition_from_mask(int num_agents, std::uint64_t mask) {
    if (num_agents < 1 || num_agents > 63)
        throw InputError("bipartition masks support 1..63 agents, got " +
                         std::to_string(num_agents));
    if (mask >> num_agents)
        throw InputError("bipartition mask " + std::to_string(mask) +
                         " has bits above agent " + std::to_string(num_agents));
    Bipartition pi;
    for (int a = 1; a <= num_agents; ++a) {
        if (mask & (std::uint64_t{1} << (a - 1)))
            pi.side2.insert(a);
        else
            pi.side1.insert(a);
    }
    return pi;
}

std::uint64_t bipartition_mask(const Bipartition& pi) {
    std::uint64_t mask = 0;
    for (int a : pi.side2) {
        if (a < 1 || a > 63)
            throw InputError("bipartition masks support 1..63 agents, got agent " +
                             std::to_string(a));
        mask |= std::uint64_t{1} << (a - 1);
    }
    return mask;
}

std::string bipartition_text(const Bipartition& pi) {
    if (pi.side1.empty()) return "-";
    std::string out;
    for (int a : pi.side1) {
        if (!out.empty()) out += ',';
        out += std::to_string(a);
    }
    return out;
}

Bipartition parse_bipartition(const std::string& text, int num_agents) {
    if (num_agents < 1)
        throw InputError("bipartition needs at least one agent");
    Bipartition pi;
    if (text != "-") {
        if (text.empty())
            throw InputError(
                "empty bipartition text (use \"-\" for an empty side 1)");
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t comma = text.find(',', pos);
            std::string token = text.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            char* end = nullptr;
            long v = std::strtol(token.c_str(), &end, 10);
            if (token.empty() || end == token.c_str() || *end != '\0')
                throw InputError("bad bipartition token \"" + token + "\"");
            if (v < 1 || v > num_agents)
                throw InputError("bipartition agent " + std::to_string(v) +
                                 " outside 1.." + std::to_string(num_agents));
            if (!pi.side1.insert(static_cast<int>(v)).second)
                throw InputError("bipartition repeats agent " + std::to_string(v));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    for (int a = 1; a <= num_agents; ++a)
        if (!pi.side1.count(a)) pi.side2.insert(a);
    return pi;
}

void require_bipartition(const LabeledGraph& g, const Bipartition& pi) {
    const int n = g.num_agents;
    std::vector<char> seen(n + 1, 0);
    auto absorb = [&](const std::set<int>& s, const char* which) {
        for (int a : s) {
            if (a < 1 || a > n)
                throw InputError(std::string("bipartition ") + which +
                                 " mentions agent " + std::to_string(a) +
                                 " outside 1.." + std::to_string(n));
            if (seen[a])
                throw InputError("agent " + std::to_string(a) +
                                 " appears on both bipartition sides");
            seen[a] = 1;
        }
    };
    absorb(pi.side1, "side 1");
    absorb(pi.side2, "side 2");
    for (int a = 1; a <= n; ++a)
        if (!seen[a])
            throw InputError("agent " + std::to_string(a) +
                             " missing from the bipartition");
}

std::vector<int> priority_order(const Bipartition& pi) {
    std::vector<int> order(pi.side1.begin(), pi.side1.end());
    order.insert(order.end(), pi.side2.begin(), pi.side2.end());
    return order;
}

Rat expected_size(const OutcomeDistribution& d) {
    Rat s(0);
    for (const auto& o : d.outcomes) s += o.probability * Rat(o.matching.size());
    return s;
}

std::vector<Rat> expected_utilities(const LabeledGraph& g,
                                    const OutcomeDistribution& d) {
    require_valid(g);
    std::vector<Rat> out(g.num_agents, Rat(0));
    for (const auto& o : d.outcomes) {
        UtilityVector u = utilities(g, o.matching);
        for (int i = 0; i < g.num_agents; ++i)
            out[i] += o.probability * Rat(u[i]);
    }
    return out;
}

bool is_feasible(const LabeledGraph& g, const Matching& m,
                 const Bipartition& pi) {
    require_valid(g);
    require_matching(g, m);
    require_bipartition(g, pi);
    const int n = g.num_agents;
    std::vector<int> side = side_table(n, pi);
    std::vector<int> internal(n + 1, 0);
    for (const auto& e : m.edges) {
        int i = g.owner(e.first), j = g.owner(e.second);
        if (i == j)
            ++internal[i];
        else if (side[i] == side[j])
            return false;
    }
    for (int a = 1; a <= n; ++a)
        if (internal[a] != max_internal_matching_size(g, a)) return false;
    return true;
}

Matching match_pi_reference(const LabeledGraph& g, const Bipartition& pi) {
    require_valid(g);
    require_bipartition(g, pi);
    if (g.num_vertices() > oracle_bound())
        throw SizeError("reference rule enumerates matchings; instance has " +
                        std::to_string(g.num_vertices()) +
                        " vertices, above the oracle bound of " +
                        std::to_string(oracle_bound()));
    std::vector<int> side = side_table(g.num_agents, pi);
    return constrained_search(g, &side, priority_order(pi));
}

WeightAssignment match_pi_weights(const LabeledGraph& g, const Bipartition& pi) {
    require_valid(g);
    require_bipartition(g, pi);
    const int m = g.num_edges();
    const int n = g.num_agents;
    if (m <= 1)
        throw InputError("the weight reduction requires at least 2 edges, got " +
                         std::to_string(m));
    const Int base(m);
    const Int S = pow(base, 2 * n + 2);
    std::vector<int> side = side_table(n, pi);
    WeightAssignment w;
    for (const auto& e : g.edges) {
        int i = g.owner(e.first), j = g.owner(e.second);
        if (i == j) {
            w.emplace(e, (base + 3) * S);
            continue;
        }
        if (side[i] == side[j]) continue;  // same-side cross edge: deleted
        int a = side[i] == 1 ? i : j;      // side-1 owner
        int b = side[i] == 1 ? j : i;      // side-2 owner
        w.emplace(e, S + pow(base, static_cast<unsigned>(2 * n + 1 - a)) +
                         pow(base, static_cast<unsigned>(n - b)));
    }
    return w;
}

Matching match_pi(const LabeledGraph& g, const Bipartition& pi) {
    require_valid(g);
    require_bipartition(g, pi);
    const int m = g.num_edges();
    std::vector<int> side = side_table(g.num_agents, pi);
    if (m == 0) return Matching{};
    if (m == 1) {
        // Degenerate instance: the sole edge is kept unless it crosses
        // between two agents on the same side.
        const Edge e = *g.edges.begin();
        int i = g.owner(e.first), j = g.owner(e.second);
        if (i != j && side[i] == side[j]) return Matching{};
        return Matching{{e}};
    }
    WeightAssignment base = match_pi_weights(g, pi);
    LabeledGraph h = g;
    for (auto it = h.edges.begin(); it != h.edges.end();)
        it = base.count(*it) ? std::next(it) : h.edges.erase(it);

    // Fused canonical solve: scaling the reduction weights by 2^(kept edge
    // count) and adding a distinct power-of-two bonus per edge (descending
    // along the ascending edge list) leaves the set of weight-optimal
    // matchings unchanged and makes the combined optimum unique — exactly
    // the lexicographically smallest sorted edge list among the tied
    // optima.
    const int mk = h.num_edges();
    WeightAssignment fused;
    int idx = 0;
    for (const auto& e : h.edges) {
        fused.emplace(e, (base.at(e) << mk) + (Int(1) << (mk - 1 - idx)));
        ++idx;
    }
    return detail::solve_max_weight_once(h, fused);
}

OutcomeDistribution mix_and_match(const LabeledGraph& g, const MixMode& mode,
                                  int max_exact_agents) {
    require_valid(g);
    const int n = g.num_agents;
    if (mode.is_exact) {
        if (n > max_exact_agents || n > 63)
            throw SizeError("exact mixture enumerates 2^" + std::to_string(n) +
                            " bipartitions, above the bound of " +
                            std::to_string(std::min(max_exact_agents, 63)));
        OutcomeDistribution d;
        const Rat p(Int(1), Int(1) << n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
            d.outcomes.push_back(
                Outcome{p, match_pi(g, bipartition_from_mask(n, mask))});
        return d;
    }
    if (n > 63)
        throw SizeError("sampled mixture supports at most 63 agents, got " +
                        std::to_string(n));
    // Documented sampling stream: the mask is the low n bits of the first
    // output of std::mt19937_64 seeded with mode.seed.
    std::mt19937_64 rng(mode.seed);
    std::uint64_t mask = rng() & ((std::uint64_t{1} << n) - 1);
    OutcomeDistribution d;
    d.outcomes.push_back(
        Outcome{Rat(1), match_pi(g, bipartition_from_mask(n, mask))});
    return d;
}

OutcomeDistribution flip_and_match(const LabeledGraph& g) {
    require_valid(g);
    if (g.num_agents != 2)
        throw InputError("flip-and-match requires exactly 2 agents, got " +
                         std::to_string(g.num_agents));
    Matching a = match_pi(g, Bipartition{{1}, {2}});

    // Second branch: maximum cardinality, then maximum total internal edge
    // count, then canonical — layered weights make that optimum unique in a
    // single solve. Cardinality layer (m+2)*2^m strictly dominates any swing
    // of the internal layer (at most m*2^m) plus bonus (< 2^m) together.
    const int m = g.num_edges();
    const Int Z = Int(1) << m;
    WeightAssignment w;
    int idx = 0;
    for (const auto& e : g.edges) {
        Int we = Z * (m + 2) + (Int(1) << (m - 1 - idx));
        if (g.owner(e.first) == g.owner(e.second)) we += Z;
        w.emplace(e, we);
        ++idx;
    }
    Matching b = detail::solve_max_weight_once(g, w);

    const Rat half(Int(1), Int(2));
    OutcomeDistribution d;
    d.outcomes.push_back(Outcome{half, std::move(a)});
    d.outcomes.push_back(Outcome{half, std::move(b)});
    return d;
}

Matching optimal_mechanism(const LabeledGraph& g) {
    return max_cardinality_matching(g);
}

Matching naive_serial(const LabeledGraph& g) {
    require_valid(g);
    if (g.num_vertices() > oracle_bound())
        throw SizeError("serial rule enumerates matchings; instance has " +
                        std::to_string(g.num_vertices()) +
                        " vertices, above the oracle bound of " +
                        std::to_string(oracle_bound()));
    std::vector<int> order(g.num_agents);
    for (int a = 1; a <= g.num_agents; ++a) order[a - 1] = a;
    return constrained_search(g, nullptr, order);
}

namespace {

OutcomeDistribution point(Matching m) {
    OutcomeDistribution d;
    d.outcomes.push_back(Outcome{Rat(1), std::move(m)});
    return d;
}

}  // namespace

Mechanism make_match_pi(const Bipartition& pi) {
    Mechanism mech;
    mech.name = "matchpi";
    mech.bipartition = pi;
    mech.run = [pi](const LabeledGraph& g) { return point(match_pi(g, pi)); };
    return mech;
}

Mechanism make_match_pi_reference(const Bipartition& pi) {
    Mechanism mech;
    mech.name = "matchpi-reference";
    mech.bipartition = pi;
    mech.run = [pi](const LabeledGraph& g) {
        return point(match_pi_reference(g, pi));
    };
    return mech;
}

Mechanism make_mix() {
    Mechanism mech;
    mech.name = "mix";
    mech.deterministic = false;
    mech.run = [](const LabeledGraph& g) { return mix_and_match(g); };
    return mech;
}

Mechanism make_mix_sampled(std::uint64_t seed) {
    Mechanism mech;
    mech.name = "mix-sampled";
    mech.deterministic = false;
    mech.exact = false;
    mech.seed = seed;
    mech.run = [seed](const LabeledGraph& g) {
        return mix_and_match(g, mix_sampled(seed));
    };
    return mech;
}

Mechanism make_flip() {
    Mechanism mech;
    mech.name = "flip";
    mech.deterministic = false;
    mech.run = [](const LabeledGraph& g) { return flip_and_match(g); };
    return mech;
}

Mechanism make_optimal() {
    Mechanism mech;
    mech.name = "optimal";
    mech.run = [](const LabeledGraph& g) { return point(optimal_mechanism(g)); };
    return mech;
}

Mechanism make_naive() {
    Mechanism mech;
    mech.name = "naive";
    mech.run = [](const LabeledGraph& g) { return point(naive_serial(g)); };
    return mech;
}

}  // namespace mechmatch
