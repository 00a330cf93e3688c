#include "mechmatch/solvers.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <type_traits>
#include <utility>

namespace mechmatch {

namespace {

// ---------------------------------------------------------------------------
// Unweighted augmenting-path search with blossom contraction, O(V^3).
// Kept fully independent of the weighted solver so the two can cross-check
// each other (unit weights must reproduce these cardinalities).

class CardinalitySolver {
public:
    explicit CardinalitySolver(int n) : n_(n), adj_(n) {}

    void add_edge(int u, int v) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }

    // Returns the maximum matching size; pairing queryable via mate().
    int solve() {
        match_.assign(n_, -1);
        // Greedy seed cuts down the number of augmenting searches.
        for (int v = 0; v < n_; ++v)
            if (match_[v] == -1)
                for (int to : adj_[v])
                    if (match_[to] == -1) {
                        match_[v] = to;
                        match_[to] = v;
                        break;
                    }
        for (int v = 0; v < n_; ++v)
            if (match_[v] == -1) find_path(v);
        int size = 0;
        for (int v = 0; v < n_; ++v)
            if (match_[v] != -1) ++size;
        return size / 2;
    }

    int mate(int v) const { return match_[v]; }

private:
    int lca(int a, int b) {
        std::vector<char> seen(n_, false);
        int cur = a;
        while (true) {
            cur = base_[cur];
            seen[cur] = true;
            if (match_[cur] == -1) break;
            cur = p_[match_[cur]];
        }
        cur = b;
        while (!seen[base_[cur]]) cur = p_[match_[cur]];
        return base_[cur];
    }

    void mark_path(int v, int b, int child) {
        while (base_[v] != b) {
            blossom_[base_[v]] = true;
            blossom_[base_[match_[v]]] = true;
            p_[v] = child;
            child = match_[v];
            v = p_[match_[v]];
        }
    }

    bool find_path(int root) {
        used_.assign(n_, false);
        p_.assign(n_, -1);
        base_.resize(n_);
        std::iota(base_.begin(), base_.end(), 0);
        used_[root] = true;
        std::vector<int> queue{root};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            for (int to : adj_[v]) {
                if (base_[v] == base_[to] || match_[v] == to) continue;
                if (to == root || (match_[to] != -1 && p_[match_[to]] != -1)) {
                    // Odd cycle: contract the blossom around the common base.
                    int curbase = lca(v, to);
                    blossom_.assign(n_, false);
                    mark_path(v, curbase, to);
                    mark_path(to, curbase, v);
                    for (int i = 0; i < n_; ++i)
                        if (blossom_[base_[i]]) {
                            base_[i] = curbase;
                            if (!used_[i]) {
                                used_[i] = true;
                                queue.push_back(i);
                            }
                        }
                } else if (p_[to] == -1) {
                    p_[to] = v;
                    if (match_[to] == -1) {
                        // Augment along the alternating path back to root.
                        int u = to;
                        while (u != -1) {
                            int pv = p_[u], ppv = match_[pv];
                            match_[u] = pv;
                            match_[pv] = u;
                            u = ppv;
                        }
                        return true;
                    }
                    used_[match_[to]] = true;
                    queue.push_back(match_[to]);
                }
            }
        }
        return false;
    }

    int n_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> match_, p_, base_;
    std::vector<char> used_, blossom_;
};

// Maps stable vertex ids to dense indices 0..k-1 and back.
struct IndexMap {
    std::vector<int> ids;          // index -> id, ascending
    std::map<int, int> index_of;   // id -> index

    explicit IndexMap(const LabeledGraph& g) : ids(g.vertex_ids()) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            index_of.emplace(ids[i], static_cast<int>(i));
    }
};

int cardinality(const LabeledGraph& g) {
    IndexMap im(g);
    CardinalitySolver solver(static_cast<int>(im.ids.size()));
    for (const auto& [u, v] : g.edges)
        solver.add_edge(im.index_of.at(u), im.index_of.at(v));
    return solver.solve();
}

// ---------------------------------------------------------------------------
// Maximum-weight matching: primal-dual blossom algorithm (Galil's survey of
// Edmonds' method), structured after the standard S/T-labelled stage/substage
// formulation. Templated on the weight type: __int128 when every quantity
// provably fits with room to spare, arbitrary-precision integers otherwise.
// All dual variables are premultiplied by two so deltas stay integral.

// Signals that a guarded __int128 run came too close to overflow and the
// caller should redo the solve with arbitrary precision.
struct OverflowRetry {};

[[noreturn]] void solver_bug(const char* what) {
    throw Error(std::string("internal weighted-matching invariant failed: ") +
                what);
}

void solver_check(bool ok, const char* what) {
    if (!ok) solver_bug(what);
}

template <typename W>
class WeightedSolver {
public:
    WeightedSolver(int nv, const std::vector<std::array<int, 2>>& ends,
                   const std::vector<W>& weights)
        : nv_(nv), ends_(ends), wt_(weights) {
        adj_.resize(nv_);
        eid_.assign(static_cast<std::size_t>(nv_) * nv_, -1);
        for (int e = 0; e < static_cast<int>(ends_.size()); ++e) {
            auto [u, v] = ends_[e];
            adj_[u].push_back({v, e});
            adj_[v].push_back({u, e});
            eid_[static_cast<std::size_t>(u) * nv_ + v] = e;
            eid_[static_cast<std::size_t>(v) * nv_ + u] = e;
        }
        maxweight_ = W{0};
        for (const W& w : wt_)
            if (w > maxweight_) maxweight_ = w;
    }

    // Runs the full algorithm and returns mate[v] per vertex (-1 single).
    std::vector<int> solve() {
        mate_.assign(nv_, -1);
        dualvar_.assign(nv_, maxweight_);
        int cap = nv_;  // handle arrays cover vertices + live blossoms
        label_.assign(cap, 0);
        labeledge_.assign(cap, kNoEdge);
        bestedge_.assign(cap, kNoEdge);
        blossomparent_.assign(cap, -1);
        blossombase_.assign(cap, -1);
        inblossom_.resize(nv_);
        std::iota(inblossom_.begin(), inblossom_.end(), 0);
        for (int v = 0; v < nv_; ++v) blossombase_[v] = v;
        allowedge_.assign(ends_.size(), false);

        if (nv_ == 0) return mate_;

        while (true) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(labeledge_.begin(), labeledge_.end(), kNoEdge);
            std::fill(bestedge_.begin(), bestedge_.end(), kNoEdge);
            for (auto& b : blossoms_)
                if (b.alive) {
                    b.mybest.clear();
                    b.has_mybest = false;
                }
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < nv_; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0)
                    assign_label(v, 1, -1);

            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    solver_check(label_[inblossom_[v]] == 1, "queue vertex not S");
                    for (auto [w, e] : adj_[v]) {
                        int bv = inblossom_[v], bw = inblossom_[w];
                        if (bv == bw) continue;  // edge internal to a blossom
                        W kslack{};
                        if (!allowedge_[e]) {
                            kslack = slack(v, w);
                            if (kslack <= W{0}) allowedge_[e] = true;
                        }
                        if (allowedge_[e]) {
                            if (label_[bw] == 0) {
                                // Free blossom: grow the tree by a T-S pair.
                                assign_label(w, 2, v);
                            } else if (label_[bw] == 1) {
                                // S-S edge: blossom or augmenting path.
                                int base = scan_blossom(v, w);
                                if (base != -1) {
                                    add_blossom(base, v, w);
                                } else {
                                    augment_matching(v, w);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                // Reached a vertex inside a T-blossom; note
                                // the entry edge for a later expansion.
                                solver_check(label_[bw] == 2, "expected T-blossom");
                                label_[w] = 2;
                                labeledge_[w] = {v, w};
                            }
                        } else if (label_[bw] == 1) {
                            if (bestedge_[bv] == kNoEdge ||
                                kslack < slack(bestedge_[bv]))
                                bestedge_[bv] = {v, w};
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == kNoEdge ||
                                kslack < slack(bestedge_[w]))
                                bestedge_[w] = {v, w};
                        }
                    }
                }
                if (augmented) break;

                // No augmenting path under the current duals: compute the
                // largest safe dual adjustment.
                int deltatype = 1;
                W delta = *std::min_element(dualvar_.begin(), dualvar_.end());
                std::pair<int, int> deltaedge = kNoEdge;
                int deltablossom = -1;

                for (int v = 0; v < nv_; ++v)
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != kNoEdge) {
                        W d = slack(bestedge_[v]);
                        if (d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                for (int b = 0; b < handle_count(); ++b)
                    if (handle_alive(b) && blossomparent_[b] == -1 &&
                        label_[b] == 1 && bestedge_[b] != kNoEdge) {
                        W ks = slack(bestedge_[b]);
                        solver_check(ks % W{2} == W{0}, "odd S-S slack");
                        W d = ks / W{2};
                        if (d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                for (int s = 0; s < static_cast<int>(blossoms_.size()); ++s)
                    if (blossoms_[s].alive && blossomparent_[nv_ + s] == -1 &&
                        label_[nv_ + s] == 2 && blossomdual_[s] < delta) {
                        delta = blossomdual_[s];
                        deltatype = 4;
                        deltablossom = nv_ + s;
                    }

                for (int v = 0; v < nv_; ++v) {
                    int lbl = label_[inblossom_[v]];
                    if (lbl == 1)
                        dualvar_[v] -= delta;
                    else if (lbl == 2)
                        dualvar_[v] += delta;
                    guard(dualvar_[v]);
                }
                for (int s = 0; s < static_cast<int>(blossoms_.size()); ++s) {
                    if (!blossoms_[s].alive || blossomparent_[nv_ + s] != -1)
                        continue;
                    if (label_[nv_ + s] == 1)
                        blossomdual_[s] += delta;
                    else if (label_[nv_ + s] == 2)
                        blossomdual_[s] -= delta;
                    guard(blossomdual_[s]);
                }

                if (deltatype == 1) break;  // optimum reached
                if (deltatype == 2 || deltatype == 3) {
                    auto [v, w] = deltaedge;
                    allowedge_[eid(v, w)] = true;
                    solver_check(label_[inblossom_[v]] == 1,
                                 "delta edge must leave an S-vertex");
                    queue_.push_back(v);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }

            for (int v = 0; v < nv_; ++v)
                if (mate_[v] != -1)
                    solver_check(mate_[mate_[v]] == v, "asymmetric mate");

            if (!augmented) break;

            // Stage done: expand S-blossoms that have no dual left.
            for (int s = 0; s < static_cast<int>(blossoms_.size()); ++s)
                if (blossoms_[s].alive && blossomparent_[nv_ + s] == -1 &&
                    label_[nv_ + s] == 1 && blossomdual_[s] == W{0})
                    expand_blossom(nv_ + s, true);
        }

        verify_optimum();
        return mate_;
    }

private:
    static constexpr std::pair<int, int> kNoEdge{-1, -1};

    struct BlossomNode {
        std::vector<int> childs;                  // handles, base first
        std::vector<std::pair<int, int>> edges;   // connecting vertex pairs
        std::vector<std::pair<int, int>> mybest;  // least-slack edges out
        bool has_mybest = false;
        bool alive = false;
    };

    int handle_count() const { return nv_ + static_cast<int>(blossoms_.size()); }
    bool is_blossom(int h) const { return h >= nv_; }
    BlossomNode& node(int h) { return blossoms_[h - nv_]; }
    bool handle_alive(int h) const {
        return h < nv_ || blossoms_[h - nv_].alive;
    }
    W& dual_of(int h) { return blossomdual_[h - nv_]; }

    int eid(int v, int w) const {
        int e = eid_[static_cast<std::size_t>(v) * nv_ + w];
        solver_check(e >= 0, "missing edge id");
        return e;
    }

    W slack(int v, int w) {
        const W& wt = wt_[eid(v, w)];
        return dualvar_[v] + dualvar_[w] - wt - wt;
    }
    W slack(const std::pair<int, int>& e) { return slack(e.first, e.second); }

    void guard(const W& value) {
        if constexpr (std::is_same_v<W, __int128>) {
            constexpr __int128 kLimit = (static_cast<__int128>(1) << 120);
            if (value > kLimit || value < -kLimit) throw OverflowRetry{};
        }
    }

    void leaves_into(int h, std::vector<int>& out) {
        if (!is_blossom(h)) {
            out.push_back(h);
            return;
        }
        std::vector<int> stack(node(h).childs);
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            if (is_blossom(t))
                stack.insert(stack.end(), node(t).childs.begin(),
                             node(t).childs.end());
            else
                out.push_back(t);
        }
    }

    int new_blossom() {
        int slot;
        if (!freeslots_.empty()) {
            slot = freeslots_.back();
            freeslots_.pop_back();
            blossoms_[slot] = BlossomNode{};
        } else {
            slot = static_cast<int>(blossoms_.size());
            blossoms_.emplace_back();
            blossomdual_.emplace_back();
            label_.push_back(0);
            labeledge_.push_back(kNoEdge);
            bestedge_.push_back(kNoEdge);
            blossomparent_.push_back(-1);
            blossombase_.push_back(-1);
        }
        blossoms_[slot].alive = true;
        return nv_ + slot;
    }

    void assign_label(int w, int t, int v) {
        int b = inblossom_[w];
        solver_check(label_[w] == 0 && label_[b] == 0, "relabelling");
        label_[w] = label_[b] = t;
        if (v != -1)
            labeledge_[w] = labeledge_[b] = {v, w};
        else
            labeledge_[w] = labeledge_[b] = kNoEdge;
        bestedge_[w] = bestedge_[b] = kNoEdge;
        if (t == 1) {
            leaves_into(b, queue_);
        } else if (t == 2) {
            int base = blossombase_[b];
            solver_check(mate_[base] != -1, "T-blossom base unmatched");
            assign_label(mate_[base], 1, base);
        }
    }

    // Traces from both ends of an S-S edge. Returns the base vertex of the
    // discovered blossom, or -1 if the trails reach two distinct roots (an
    // augmenting path).
    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        int a = v, c = w;
        while (a != -1) {
            int b = inblossom_[a];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            solver_check(label_[b] == 1, "scan expects S-blossom");
            path.push_back(b);
            label_[b] = 5;  // breadcrumb
            if (labeledge_[b] == kNoEdge) {
                solver_check(mate_[blossombase_[b]] == -1, "rooted blossom");
                a = -1;
            } else {
                solver_check(labeledge_[b].first == mate_[blossombase_[b]],
                             "label edge mismatch");
                a = labeledge_[b].first;
                int bt = inblossom_[a];
                solver_check(label_[bt] == 2, "expected T between S steps");
                a = labeledge_[bt].first;
            }
            if (c != -1) std::swap(a, c);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int v, int w) {
        int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        int b = new_blossom();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& childs = node(b).childs;
        auto& edges = node(b).edges;
        edges.push_back({v, w});

        int vv = v;
        while (bv != bb) {
            blossomparent_[bv] = b;
            childs.push_back(bv);
            edges.push_back(labeledge_[bv]);
            solver_check(label_[bv] == 2 ||
                             (label_[bv] == 1 &&
                              labeledge_[bv].first == mate_[blossombase_[bv]]),
                         "bad sub-blossom on v-trail");
            vv = labeledge_[bv].first;
            bv = inblossom_[vv];
        }
        childs.push_back(bb);
        std::reverse(childs.begin(), childs.end());
        std::reverse(edges.begin(), edges.end());

        int ww = w;
        while (bw != bb) {
            blossomparent_[bw] = b;
            childs.push_back(bw);
            edges.push_back({labeledge_[bw].second, labeledge_[bw].first});
            solver_check(label_[bw] == 2 ||
                             (label_[bw] == 1 &&
                              labeledge_[bw].first == mate_[blossombase_[bw]]),
                         "bad sub-blossom on w-trail");
            ww = labeledge_[bw].first;
            bw = inblossom_[ww];
        }

        solver_check(label_[bb] == 1, "blossom base not S");
        label_[b] = 1;
        labeledge_[b] = labeledge_[bb];
        dual_of(b) = W{0};

        std::vector<int> lv;
        leaves_into(b, lv);
        for (int leaf : lv) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }

        // Recompute least-slack edges toward every other top-level S-blossom.
        std::map<int, std::pair<int, int>> bestedgeto;
        for (int child : childs) {
            std::vector<std::pair<int, int>> nblist;
            if (is_blossom(child)) {
                if (node(child).has_mybest) {
                    nblist = std::move(node(child).mybest);
                    node(child).mybest.clear();
                    node(child).has_mybest = false;
                } else {
                    std::vector<int> clv;
                    leaves_into(child, clv);
                    for (int leaf : clv)
                        for (auto [nbr, e] : adj_[leaf]) nblist.push_back({leaf, nbr});
                }
            } else {
                for (auto [nbr, e] : adj_[child]) nblist.push_back({child, nbr});
            }
            for (const auto& k : nblist) {
                int i = k.first, j = k.second;
                if (inblossom_[j] == b) std::swap(i, j);
                int bj = inblossom_[j];
                if (bj != b && label_[bj] == 1) {
                    auto it = bestedgeto.find(bj);
                    if (it == bestedgeto.end() || slack(i, j) < slack(it->second))
                        bestedgeto[bj] = k;
                }
            }
            bestedge_[child] = kNoEdge;
        }
        auto& mybest = node(b).mybest;
        mybest.clear();
        for (auto& [bj, e] : bestedgeto) mybest.push_back(e);
        node(b).has_mybest = true;

        bestedge_[b] = kNoEdge;
        for (const auto& e : mybest)
            if (bestedge_[b] == kNoEdge || slack(e) < slack(bestedge_[b]))
                bestedge_[b] = e;
    }

    void expand_blossom(int b, bool endstage) {
        // Children become top-level again (recursively when a child S-blossom
        // has no dual left at stage end).
        auto childs_snapshot = node(b).childs;
        for (int s : childs_snapshot) {
            blossomparent_[s] = -1;
            if (!is_blossom(s)) {
                inblossom_[s] = s;
            } else if (endstage && dual_of(s) == W{0}) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> lv;
                leaves_into(s, lv);
                for (int leaf : lv) inblossom_[leaf] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            // Mid-stage expansion of a T-blossom: relabel the even-length
            // side of the cycle from the entry child to the base, and leave
            // the rest reachable for later.
            auto& childs = node(b).childs;
            auto& edges = node(b).edges;
            int len = static_cast<int>(childs.size());
            auto child_at = [&](int j) { return childs[((j % len) + len) % len]; };
            auto edge_at = [&](int j) { return edges[((j % len) + len) % len]; };

            int entrychild = inblossom_[labeledge_[b].second];
            int j = static_cast<int>(
                std::find(childs.begin(), childs.end(), entrychild) -
                childs.begin());
            int jstep;
            if (j & 1) {
                j -= len;  // odd index: walk forward, wrapping through 0
                jstep = 1;
            } else {
                jstep = -1;  // even index: walk backward
            }
            auto [v, w] = labeledge_[b];
            while (j != 0) {
                int p, q;
                if (jstep == 1) {
                    auto e = edge_at(j);
                    p = e.first;
                    q = e.second;
                } else {
                    auto e = edge_at(j - 1);
                    p = e.second;
                    q = e.first;
                }
                label_[w] = 0;
                label_[q] = 0;
                assign_label(w, 2, v);
                allowedge_[eid(p, q)] = true;
                j += jstep;
                if (jstep == 1) {
                    auto e = edge_at(j);
                    v = e.first;
                    w = e.second;
                } else {
                    auto e = edge_at(j - 1);
                    w = e.first;
                    v = e.second;
                }
                allowedge_[eid(v, w)] = true;
                j += jstep;
            }
            // Relabel the base child without stepping to its mate.
            int bw = child_at(j);
            label_[w] = label_[bw] = 2;
            labeledge_[w] = labeledge_[bw] = {v, w};
            bestedge_[bw] = kNoEdge;
            j += jstep;
            while (child_at(j) != entrychild) {
                int bv = child_at(j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                int vv = -1;
                if (is_blossom(bv)) {
                    std::vector<int> lv;
                    leaves_into(bv, lv);
                    for (int leaf : lv)
                        if (label_[leaf] != 0) {
                            vv = leaf;
                            break;
                        }
                } else {
                    vv = bv;
                }
                if (vv != -1 && label_[vv] != 0) {
                    solver_check(label_[vv] == 2, "expected entered T-vertex");
                    solver_check(inblossom_[vv] == bv, "stale inblossom");
                    label_[vv] = 0;
                    label_[mate_[blossombase_[bv]]] = 0;
                    assign_label(vv, 2, labeledge_[vv].first);
                }
                j += jstep;
            }
        }
        label_[b] = 0;
        labeledge_[b] = kNoEdge;
        bestedge_[b] = kNoEdge;
        blossomparent_[b] = -1;
        blossombase_[b] = -1;
        node(b).alive = false;
        freeslots_.push_back(b - nv_);
    }

    // Swaps matched/unmatched edges inside blossom b so that vertex v
    // becomes its base.
    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (is_blossom(t)) augment_blossom(t, v);

        auto& childs = node(b).childs;
        auto& edges = node(b).edges;
        int len = static_cast<int>(childs.size());
        auto child_at = [&](int j) { return childs[((j % len) + len) % len]; };
        auto edge_at = [&](int j) { return edges[((j % len) + len) % len]; };

        int i = static_cast<int>(
            std::find(childs.begin(), childs.end(), t) - childs.begin());
        int j = i, jstep;
        if (i & 1) {
            j -= len;
            jstep = 1;
        } else {
            jstep = -1;
        }
        while (j != 0) {
            j += jstep;
            int tt = child_at(j);
            int w, x;
            if (jstep == 1) {
                auto e = edge_at(j);
                w = e.first;
                x = e.second;
            } else {
                auto e = edge_at(j - 1);
                x = e.first;
                w = e.second;
            }
            if (is_blossom(tt)) augment_blossom(tt, w);
            j += jstep;
            tt = child_at(j);
            if (is_blossom(tt)) augment_blossom(tt, x);
            mate_[w] = x;
            mate_[x] = w;
        }
        std::rotate(childs.begin(), childs.begin() + i, childs.end());
        std::rotate(edges.begin(), edges.begin() + i, edges.end());
        blossombase_[b] = blossombase_[childs[0]];
        solver_check(blossombase_[b] == v, "augmented base mismatch");
    }

    // Swaps matched/unmatched edges along the augmenting path through
    // S-vertices v and w.
    void augment_matching(int v, int w) {
        const std::array<std::pair<int, int>, 2> starts{{{v, w}, {w, v}}};
        for (auto [s0, j0] : starts) {
            int s = s0, j = j0;
            while (true) {
                int bs = inblossom_[s];
                solver_check(label_[bs] == 1, "augment through non-S");
                solver_check(
                    (labeledge_[bs] == kNoEdge &&
                     mate_[blossombase_[bs]] == -1) ||
                        labeledge_[bs].first == mate_[blossombase_[bs]],
                    "augment label edge mismatch");
                if (is_blossom(bs)) augment_blossom(bs, s);
                mate_[s] = j;
                if (labeledge_[bs] == kNoEdge) break;  // reached a root
                int t = labeledge_[bs].first;
                int bt = inblossom_[t];
                solver_check(label_[bt] == 2, "expected T on trail");
                s = labeledge_[bt].first;
                j = labeledge_[bt].second;
                solver_check(blossombase_[bt] == t, "T base mismatch");
                if (is_blossom(bt)) augment_blossom(bt, j);
                mate_[j] = s;
            }
        }
    }

    // Exact complementary-slackness certificate for the final solution.
    void verify_optimum() {
        for (int v = 0; v < nv_; ++v)
            solver_check(dualvar_[v] >= W{0}, "negative vertex dual");
        for (int s = 0; s < static_cast<int>(blossoms_.size()); ++s)
            if (blossoms_[s].alive)
                solver_check(blossomdual_[s] >= W{0}, "negative blossom dual");

        for (int e = 0; e < static_cast<int>(ends_.size()); ++e) {
            auto [i, j] = ends_[e];
            W s = dualvar_[i] + dualvar_[j] - wt_[e] - wt_[e];
            std::vector<int> iblossoms{i}, jblossoms{j};
            while (blossomparent_[iblossoms.back()] != -1)
                iblossoms.push_back(blossomparent_[iblossoms.back()]);
            while (blossomparent_[jblossoms.back()] != -1)
                jblossoms.push_back(blossomparent_[jblossoms.back()]);
            std::reverse(iblossoms.begin(), iblossoms.end());
            std::reverse(jblossoms.begin(), jblossoms.end());
            for (std::size_t k = 0;
                 k < std::min(iblossoms.size(), jblossoms.size()); ++k) {
                if (iblossoms[k] != jblossoms[k]) break;
                if (is_blossom(iblossoms[k]))
                    s += dual_of(iblossoms[k]) + dual_of(iblossoms[k]);
            }
            solver_check(s >= W{0}, "negative slack");
            if (mate_[i] == j || mate_[j] == i) {
                solver_check(mate_[i] == j && mate_[j] == i, "half-matched edge");
                solver_check(s == W{0}, "matched edge with slack");
            }
        }
        for (int v = 0; v < nv_; ++v)
            solver_check(mate_[v] != -1 || dualvar_[v] == W{0},
                         "single vertex with dual left");
        for (int s = 0; s < static_cast<int>(blossoms_.size()); ++s) {
            if (!blossoms_[s].alive || !(blossomdual_[s] > W{0})) continue;
            const auto& edges = blossoms_[s].edges;
            solver_check(edges.size() % 2 == 1, "even blossom");
            for (std::size_t k = 1; k < edges.size(); k += 2) {
                auto [a, c] = edges[k];
                solver_check(mate_[a] == c && mate_[c] == a,
                             "full blossom with unmatched rim edge");
            }
        }
    }

    int nv_;
    std::vector<std::array<int, 2>> ends_;
    std::vector<W> wt_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    std::vector<int> eid_;
    W maxweight_{};

    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<std::pair<int, int>> labeledge_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<int> blossombase_;
    std::vector<std::pair<int, int>> bestedge_;
    std::vector<W> dualvar_;
    std::vector<W> blossomdual_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
    std::vector<BlossomNode> blossoms_;
    std::vector<int> freeslots_;
};

__int128 to_i128(const Int& x) {
    const std::uint64_t lo =
        static_cast<std::uint64_t>(x & Int{0xFFFFFFFFFFFFFFFFULL});
    const std::uint64_t hi = static_cast<std::uint64_t>(x >> 64);
    return (static_cast<__int128>(hi) << 64) | static_cast<__int128>(lo);
}

// Dense edge-indexed form of a weighted problem.
struct WeightedProblem {
    IndexMap im;
    std::vector<std::array<int, 2>> ends;
    std::vector<Edge> edge_ids;  // original-id edges, ascending
    std::vector<Int> weights;

    WeightedProblem(const LabeledGraph& g, const WeightAssignment& w) : im(g) {
        for (const auto& [e, wt] : w) {
            if (g.edges.count(e) == 0)
                throw InputError("weight for nonexistent edge (" +
                                 std::to_string(e.first) + "," +
                                 std::to_string(e.second) + ")");
            if (wt < 0)
                throw InputError("negative weight on edge (" +
                                 std::to_string(e.first) + "," +
                                 std::to_string(e.second) + ")");
        }
        for (const auto& e : g.edges) {
            edge_ids.push_back(e);
            ends.push_back({im.index_of.at(e.first), im.index_of.at(e.second)});
            auto it = w.find(e);
            weights.push_back(it == w.end() ? Int{0} : it->second);
        }
    }
};

// Dispatches between the __int128 fast path and arbitrary precision. The
// fast path is guarded: any dual that grows near the representable range
// aborts the run, and the solve is redone with big integers.
std::vector<int> solve_problem(const WeightedProblem& p) {
    int nv = static_cast<int>(p.im.ids.size());
    unsigned maxbits = 0;
    for (const Int& w : p.weights)
        if (w > 0) maxbits = std::max(maxbits, boost::multiprecision::msb(w) + 1);
    unsigned nvbits = 0;
    while ((1u << nvbits) < static_cast<unsigned>(nv + 2)) ++nvbits;

    if (maxbits + 2 * nvbits + 6 <= 120) {
        std::vector<__int128> w128;
        w128.reserve(p.weights.size());
        for (const Int& w : p.weights) w128.push_back(to_i128(w));
        try {
            return WeightedSolver<__int128>(nv, p.ends, w128).solve();
        } catch (const OverflowRetry&) {
            // fall through to arbitrary precision
        }
    }
    return WeightedSolver<Int>(nv, p.ends, p.weights).solve();
}

Matching mate_to_matching(const WeightedProblem& p, const std::vector<int>& mate) {
    Matching m;
    for (int v = 0; v < static_cast<int>(mate.size()); ++v)
        if (mate[v] > v)
            m.edges.insert(make_edge(p.im.ids[v], p.im.ids[mate[v]]));
    return m;
}

Int matching_weight(const WeightAssignment& w, const Matching& m) {
    Int total = 0;
    for (const auto& e : m.edges) {
        auto it = w.find(e);
        if (it != w.end()) total += it->second;
    }
    return total;
}

WeightAssignment restrict_weights(const WeightAssignment& w,
                                  const LabeledGraph& g) {
    WeightAssignment out;
    for (const auto& [e, wt] : w)
        if (g.edges.count(e)) out.emplace(e, wt);
    return out;
}

}  // namespace

namespace detail {

Matching solve_max_weight_once(const LabeledGraph& g, const WeightAssignment& w) {
    require_valid(g);
    WeightedProblem p(g, w);
    return mate_to_matching(p, solve_problem(p));
}

Int max_weight_value(const LabeledGraph& g, const WeightAssignment& w) {
    require_valid(g);
    WeightedProblem p(g, w);
    Matching m = mate_to_matching(p, solve_problem(p));
    return matching_weight(w, m);
}

}  // namespace detail

int max_matching_size(const LabeledGraph& g) {
    require_valid(g);
    return cardinality(g);
}

Matching max_cardinality_matching(const LabeledGraph& g) {
    require_valid(g);
    const int best = cardinality(g);

    // Build the lexicographically smallest optimal edge list greedily: an
    // edge joins the prefix iff the rest of the graph can still supply the
    // missing cardinality. Rejected edges stay rejected (removing more
    // vertices never revives an extension), so each edge is probed once.
    Matching result;
    std::set<int> removed;
    std::vector<Edge> candidates(g.edges.begin(), g.edges.end());
    std::size_t next = 0;
    while (result.size() < best) {
        bool advanced = false;
        for (; next < candidates.size(); ++next) {
            const Edge& e = candidates[next];
            if (removed.count(e.first) || removed.count(e.second)) continue;
            std::set<int> keep;
            for (int v : g.vertex_ids())
                if (!removed.count(v) && v != e.first && v != e.second)
                    keep.insert(v);
            if (cardinality(induced_subgraph(g, keep)) ==
                best - result.size() - 1) {
                result.edges.insert(e);
                removed.insert(e.first);
                removed.insert(e.second);
                ++next;
                advanced = true;
                break;
            }
        }
        solver_check(advanced, "canonical prefix not extendable");
    }
    return result;
}

Matching max_weight_matching(const LabeledGraph& g, const WeightAssignment& w) {
    require_valid(g);
    WeightedProblem p(g, w);  // validates the weights
    const Int best = detail::max_weight_value(g, w);

    // Same greedy prefix construction as the cardinality case, driven by
    // optimal values of shrinking subproblems. The loop stops as soon as the
    // prefix already carries the full optimal weight: any further zero-weight
    // edge would only grow the sorted edge list, and a proper prefix orders
    // first.
    Matching result;
    Int carried = 0;
    std::set<int> removed;
    std::vector<Edge> candidates(g.edges.begin(), g.edges.end());
    std::size_t next = 0;
    while (carried != best) {
        bool advanced = false;
        for (; next < candidates.size(); ++next) {
            const Edge& e = candidates[next];
            if (removed.count(e.first) || removed.count(e.second)) continue;
            std::set<int> keep;
            for (int v : g.vertex_ids())
                if (!removed.count(v) && v != e.first && v != e.second)
                    keep.insert(v);
            LabeledGraph sub = induced_subgraph(g, keep);
            Int we = 0;
            if (auto it = w.find(e); it != w.end()) we = it->second;
            if (carried + we +
                    detail::max_weight_value(sub, restrict_weights(w, sub)) ==
                best) {
                result.edges.insert(e);
                carried += we;
                removed.insert(e.first);
                removed.insert(e.second);
                ++next;
                advanced = true;
                break;
            }
        }
        solver_check(advanced, "canonical weighted prefix not extendable");
    }
    return result;
}

void for_each_matching(const LabeledGraph& g,
                       const std::function<void(const std::vector<Edge>&)>& fn) {
    require_valid(g);
    std::vector<Edge> edges(g.edges.begin(), g.edges.end());
    std::vector<Edge> current;
    std::set<int> used;

    // Include/exclude recursion over the ascending edge list: every matching
    // is visited exactly once, and matchings of equal size appear in
    // ascending sorted-edge-list order because inclusion recurses first.
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == edges.size()) {
            fn(current);
            return;
        }
        const auto& [u, v] = edges[i];
        if (!used.count(u) && !used.count(v)) {
            used.insert(u);
            used.insert(v);
            current.push_back(edges[i]);
            self(self, i + 1);
            current.pop_back();
            used.erase(u);
            used.erase(v);
        }
        self(self, i + 1);
    };
    rec(rec, 0);
}

std::vector<Matching> enumerate_maximum_matchings(const LabeledGraph& g) {
    require_valid(g);
    if (g.num_vertices() > oracle_bound())
        throw SizeError("enumerate_maximum_matchings: instance has " +
                        std::to_string(g.num_vertices()) +
                        " vertices, above the oracle bound of " +
                        std::to_string(oracle_bound()));
    std::size_t best = 0;
    for_each_matching(g, [&](const std::vector<Edge>& m) {
        best = std::max(best, m.size());
    });
    std::vector<Matching> out;
    for_each_matching(g, [&](const std::vector<Edge>& m) {
        if (m.size() == best)
            out.push_back(Matching{std::set<Edge>(m.begin(), m.end())});
    });
    return out;
}

int max_internal_matching_size(const LabeledGraph& g, int agent) {
    require_valid(g);
    auto verts = g.agent_vertices(agent);  // validates the agent id
    return cardinality(
        induced_subgraph(g, std::set<int>(verts.begin(), verts.end())));
}

}  // namespace mechmatch
