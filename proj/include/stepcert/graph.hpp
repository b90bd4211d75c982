#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "stepcert/error.hpp"

namespace stepcert {

// Labeled graph on vertices {0,...,order-1}; edges sorted, smaller index first.
struct Graph {
    int order = 0;
    std::vector<std::pair<int, int>> edges;
};

inline Graph make_graph(int order, std::vector<std::pair<int, int>> edges) {
    require(order >= 1, "MalformedGraph", "graph order must be at least 1");
    for (auto& [a, b] : edges) {
        if (a > b) std::swap(a, b);
        require(a != b, "MalformedGraph", "loops are not allowed");
        require(a >= 0 && b < order, "MalformedGraph", "edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end());
    require(std::adjacent_find(edges.begin(), edges.end()) == edges.end(),
            "MalformedGraph", "duplicate edge");
    return Graph{order, std::move(edges)};
}

namespace detail {

// Pairs are indexed column-major, (i,j) with i<j at j(j-1)/2+i: the same bit
// order graph6 uses, and the order in which a DFS over vertex positions fixes
// bits (all pairs inside a prefix come before pairs touching later vertices).
inline int pair_index(int i, int j) { return j * (j - 1) / 2 + i; }

inline const std::vector<std::pair<int, int>>& pairs_of(int order) {
    static std::array<std::vector<std::pair<int, int>>, 10> cache;
    static std::once_flag flags;
    std::call_once(flags, [] {
        for (int n = 0; n <= 9; ++n)
            for (int j = 1; j < n; ++j)
                for (int i = 0; i < j; ++i) cache[static_cast<std::size_t>(n)].push_back({i, j});
    });
    return cache.at(static_cast<std::size_t>(order));
}

inline std::uint64_t edge_mask(const Graph& g) {
    std::uint64_t m = 0;
    for (auto [a, b] : g.edges) m |= std::uint64_t{1} << pair_index(a, b);
    return m;
}

inline std::vector<std::pair<int, int>> mask_edges(int order, std::uint64_t mask) {
    std::vector<std::pair<int, int>> edges;
    const auto& ps = pairs_of(order);
    for (std::size_t t = 0; t < ps.size(); ++t)
        if (mask >> t & 1) edges.push_back(ps[t]);
    std::sort(edges.begin(), edges.end());
    return edges;
}

// canon[mask] = smallest mask in its relabeling orbit, for one fixed order.
inline std::vector<std::uint32_t> build_canon_table(int n) {
    int bits = n * (n - 1) / 2;
    // Bit permutation induced by swapping vertices k and k+1.
    std::vector<std::array<std::uint8_t, 21>> gen(static_cast<std::size_t>(std::max(n - 1, 0)));
    for (int k = 0; k + 1 < n; ++k)
        for (auto [i, j] : pairs_of(n)) {
            auto sw = [&](int v) { return v == k ? k + 1 : v == k + 1 ? k : v; };
            int a = sw(i), b = sw(j);
            if (a > b) std::swap(a, b);
            gen[static_cast<std::size_t>(k)][static_cast<std::size_t>(pair_index(i, j))] =
                static_cast<std::uint8_t>(pair_index(a, b));
        }
    const std::uint32_t unseen = 0xffffffffu;
    std::vector<std::uint32_t> canon(std::size_t{1} << bits, unseen);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t root = 0; root < canon.size(); ++root) {
        if (canon[root] != unseen) continue;
        canon[root] = root;
        stack.assign(1, root);
        while (!stack.empty()) {
            std::uint32_t m = stack.back();
            stack.pop_back();
            for (int k = 0; k + 1 < n; ++k) {
                std::uint32_t rest = m, out = 0;
                while (rest) {
                    int b = __builtin_ctz(rest);
                    rest &= rest - 1;
                    out |= std::uint32_t{1} << gen[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)];
                }
                if (canon[out] == unseen) {
                    canon[out] = root;
                    stack.push_back(out);
                }
            }
        }
    }
    return canon;
}

inline const std::vector<std::uint32_t>& canon_table(int n) {
    static std::array<std::vector<std::uint32_t>, 8> tables;
    static std::array<std::once_flag, 8> flags;
    std::call_once(flags.at(static_cast<std::size_t>(n)),
                   [n] { tables.at(static_cast<std::size_t>(n)) = build_canon_table(n); });
    return tables[static_cast<std::size_t>(n)];
}

// Branch-and-bound minimal relabeling for orders 8 and 9. Positions are
// assigned in order; the bit string over pair_index is compared column by
// column (chunk j = adjacencies of position j to positions 0..j-1, earlier
// positions more significant). Vertices interchangeable by a transposition
// fixing everything else (twins) are tried once per level.
struct MinLabelSearch {
    int n;
    std::array<std::uint16_t, 9> row{};
    std::array<int, 9> open_twin{}, closed_twin{};
    std::array<int, 9> pos{}, chunks{}, best{};
    std::uint16_t used = 0;
    bool best_set = false;

    explicit MinLabelSearch(int order, std::uint64_t mask) : n(order) {
        for (auto [i, j] : pairs_of(n))
            if (mask >> pair_index(i, j) & 1) {
                row[static_cast<std::size_t>(i)] |= static_cast<std::uint16_t>(1 << j);
                row[static_cast<std::size_t>(j)] |= static_cast<std::uint16_t>(1 << i);
            }
        for (int v = 0; v < n; ++v) {
            open_twin[static_cast<std::size_t>(v)] = v;
            closed_twin[static_cast<std::size_t>(v)] = v;
            for (int u = 0; u < v; ++u) {
                if (row[static_cast<std::size_t>(u)] == row[static_cast<std::size_t>(v)])
                    open_twin[static_cast<std::size_t>(v)] = open_twin[static_cast<std::size_t>(u)];
                auto closed = [&](int x) {
                    return static_cast<std::uint16_t>(row[static_cast<std::size_t>(x)] | (1 << x));
                };
                if (closed(u) == closed(v))
                    closed_twin[static_cast<std::size_t>(v)] = closed_twin[static_cast<std::size_t>(u)];
            }
        }
    }

    // Returns true if best was replaced by a completion of the current prefix.
    bool dfs(int depth, bool below_best) {
        if (depth == n) {
            best = chunks;
            best_set = true;
            return true;
        }
        std::array<std::pair<int, int>, 9> cand{};
        int nc = 0;
        for (int v = 0; v < n; ++v) {
            if (used >> v & 1) continue;
            int c = 0;
            for (int t = 0; t < depth; ++t)
                c |= (row[static_cast<std::size_t>(v)] >> pos[static_cast<std::size_t>(t)] & 1)
                     << (depth - 1 - t);
            cand[static_cast<std::size_t>(nc++)] = {c, v};
        }
        std::sort(cand.begin(), cand.begin() + nc);
        bool updated = false;
        int tried_open = 0, tried_closed = 0;
        for (int idx = 0; idx < nc; ++idx) {
            auto [c, v] = cand[static_cast<std::size_t>(idx)];
            if (best_set && !below_best && c > best[static_cast<std::size_t>(depth)]) break;
            int ot = open_twin[static_cast<std::size_t>(v)], ct = closed_twin[static_cast<std::size_t>(v)];
            if ((tried_open >> ot & 1) || (tried_closed >> ct & 1)) continue;
            tried_open |= 1 << ot;
            tried_closed |= 1 << ct;
            bool child_below = below_best || !best_set || c < best[static_cast<std::size_t>(depth)];
            pos[static_cast<std::size_t>(depth)] = v;
            chunks[static_cast<std::size_t>(depth)] = c;
            used = static_cast<std::uint16_t>(used | (1 << v));
            if (dfs(depth + 1, child_below)) {
                updated = true;
                below_best = false;
            }
            used = static_cast<std::uint16_t>(used & ~(1 << v));
        }
        return updated;
    }

    std::uint64_t run() {
        dfs(0, false);
        std::uint64_t mask = 0;
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i)
                if (best[static_cast<std::size_t>(j)] >> (j - 1 - i) & 1)
                    mask |= std::uint64_t{1} << pair_index(i, j);
        return mask;
    }
};

inline std::uint64_t canonical_mask(int order, std::uint64_t mask) {
    if (order <= 7) return canon_table(order)[static_cast<std::size_t>(mask)];
    return MinLabelSearch(order, mask).run();
}

} // namespace detail

// Canonical representative of an isomorphism class: the relabeling whose
// column-major edge bit string is minimal. Equal iff isomorphic.
struct CanonGraph {
    int order = 0;
    std::vector<std::pair<int, int>> edges;

    Graph to_graph() const { return make_graph(order, edges); }
    friend bool operator==(const CanonGraph& a, const CanonGraph& b) {
        return a.order == b.order && a.edges == b.edges;
    }
    friend bool operator!=(const CanonGraph& a, const CanonGraph& b) { return !(a == b); }
    friend bool operator<(const CanonGraph& a, const CanonGraph& b) {
        if (a.order != b.order) return a.order < b.order;
        if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
        return a.edges < b.edges;
    }
};

inline CanonGraph canonical_form(const Graph& g) {
    require(g.order <= 9, "TooLarge", "canonicalization supports order <= 9");
    std::uint64_t cm = detail::canonical_mask(g.order, detail::edge_mask(g));
    return CanonGraph{g.order, detail::mask_edges(g.order, cm)};
}

inline int min_degree(const Graph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.order), 0);
    for (auto [a, b] : g.edges) {
        ++deg[static_cast<std::size_t>(a)];
        ++deg[static_cast<std::size_t>(b)];
    }
    return *std::min_element(deg.begin(), deg.end());
}

inline bool is_clique(const Graph& g) {
    return static_cast<int>(g.edges.size()) == g.order * (g.order - 1) / 2;
}

inline Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) e.push_back({i, j});
    return make_graph(n, std::move(e));
}

inline Graph complement(const Graph& g) {
    std::vector<std::pair<int, int>> edges;
    for (auto p : detail::pairs_of(g.order))
        if (!std::binary_search(g.edges.begin(), g.edges.end(),
                                std::pair<int, int>{p.first, p.second}))
            edges.push_back(p);
    return make_graph(g.order, std::move(edges));
}

namespace detail {

// Compact a graph given as a pair-index mask down to its non-isolated support;
// returns {support order, mask over the support} or order 0 for no edges.
inline std::pair<int, std::uint64_t> strip_isolated(int order, std::uint64_t mask) {
    int seen = 0;
    for (auto [i, j] : pairs_of(order))
        if (mask >> pair_index(i, j) & 1) seen |= (1 << i) | (1 << j);
    std::array<int, 9> to{};
    int k = 0;
    for (int v = 0; v < order; ++v)
        if (seen >> v & 1) to[static_cast<std::size_t>(v)] = k++;
    std::uint64_t out = 0;
    for (auto [i, j] : pairs_of(order))
        if (mask >> pair_index(i, j) & 1)
            out |= std::uint64_t{1}
                   << pair_index(to[static_cast<std::size_t>(i)], to[static_cast<std::size_t>(j)]);
    return {k, out};
}

// Canonical masks of all isomorphism classes on exactly `order` labeled
// vertices (isolated vertices allowed, empty graph included).
inline std::vector<std::uint64_t> classes_on(int order) {
    if (order <= 7) {
        const auto& table = canon_table(order);
        std::vector<std::uint64_t> reps;
        for (std::uint32_t m = 0; m < table.size(); ++m)
            if (table[m] == m) reps.push_back(m);
        return reps;
    }
    // Every graph on k vertices is some graph on k-1 vertices plus one vertex
    // with an arbitrary neighborhood; the new vertex's column occupies the top
    // bits, so augmentation is mask | nb << C(k-1,2).
    std::vector<std::uint64_t> prev = classes_on(order - 1);
    int base = (order - 1) * (order - 2) / 2;
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint64_t> reps;
    for (std::uint64_t p : prev)
        for (std::uint64_t nb = 0; nb < (std::uint64_t{1} << (order - 1)); ++nb) {
            std::uint64_t cm = canonical_mask(order, p | nb << base);
            if (seen.insert(cm).second) reps.push_back(cm);
        }
    return reps;
}

} // namespace detail

// All isomorphism classes with at least one edge and no isolated vertices on
// at most m vertices, each on its support order. Classes on exactly m vertices
// (isolated allowed) biject with these by dropping the isolated vertices.
inline std::vector<CanonGraph> enumerate_H(int m) {
    require(m >= 3 && m <= 9, "TooLarge", "enumerate_H supports 3 <= m <= 9");
    std::vector<CanonGraph> out;
    for (std::uint64_t rep : detail::classes_on(m)) {
        auto [k, sm] = detail::strip_isolated(m, rep);
        if (k == 0) continue;
        std::uint64_t cm = detail::canonical_mask(k, sm);
        out.push_back(CanonGraph{k, detail::mask_edges(k, cm)});
    }
    std::sort(out.begin(), out.end());
    return out;
}

// n_j = number of e(H)-element sets of vertex pairs of F, exactly j of them
// non-edges of F, whose union (isolated vertices dropped) is isomorphic to H.
inline std::vector<long> count_nj(const Graph& h, const Graph& f) {
    require(min_degree(h) >= 1, "NotEmbeddable", "H has isolated vertices");
    require(h.order <= f.order, "NotEmbeddable", "H needs more vertices than F has");
    require(f.order <= 9, "TooLarge", "count_nj supports order <= 9");
    CanonGraph target = canonical_form(h);
    std::uint64_t target_mask = detail::edge_mask(target.to_graph());
    int npairs = f.order * (f.order - 1) / 2;
    int e = static_cast<int>(h.edges.size());
    std::uint64_t fmask = detail::edge_mask(f);
    std::vector<long> nj(static_cast<std::size_t>(e) + 1, 0);
    // Gosper's hack over all e-element subsets of the pair set.
    std::uint64_t sub = (std::uint64_t{1} << e) - 1;
    std::uint64_t limit = std::uint64_t{1} << npairs;
    while (sub < limit) {
        auto [k, sm] = detail::strip_isolated(f.order, sub);
        if (k == target.order && detail::canonical_mask(k, sm) == target_mask) {
            int j = __builtin_popcountll(sub & ~fmask);
            ++nj[static_cast<std::size_t>(j)];
        }
        std::uint64_t c = sub & (~sub + 1), r = sub + c;
        sub = (((r ^ sub) >> 2) / c) | r;
    }
    return nj;
}

// graph6, single-byte order form (order <= 62): byte order+63, then the
// column-major pair bits packed big-endian into 6-bit groups, each +63.
inline std::string to_graph6(const Graph& g) {
    require(g.order <= 62, "TooLarge", "graph6 single-byte form needs order <= 62");
    std::string s(1, static_cast<char>(g.order + 63));
    int npairs = g.order * (g.order - 1) / 2;
    std::uint64_t mask = detail::edge_mask(g);
    for (int base = 0; base < npairs; base += 6) {
        int group = 0;
        for (int b = 0; b < 6 && base + b < npairs; ++b)
            group |= static_cast<int>(mask >> (base + b) & 1) << (5 - b);
        s.push_back(static_cast<char>(group + 63));
    }
    return s;
}

inline Graph parse_graph6(const std::string& s) {
    const auto bad = [&](const std::string& why) {
        fail("MalformedGraph6", why + " in graph6 string '" + s + "'");
    };
    if (s.empty()) bad("empty input");
    int order = static_cast<unsigned char>(s[0]) - 63;
    if (order < 1 || order > 9) bad("order outside [1,9]");
    int npairs = order * (order - 1) / 2;
    if (static_cast<int>(s.size()) != 1 + (npairs + 5) / 6) bad("wrong length");
    std::uint64_t mask = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        int c = static_cast<unsigned char>(s[i]) - 63;
        if (c < 0 || c > 63) bad("byte outside graph6 range");
        for (int b = 0; b < 6; ++b) {
            int t = static_cast<int>(i - 1) * 6 + b;
            bool bit = c >> (5 - b) & 1;
            if (t < npairs)
                mask |= std::uint64_t{bit} << t;
            else if (bit)
                bad("nonzero padding bits");
        }
    }
    return make_graph(order, detail::mask_edges(order, mask));
}

// Built-in graphs accepted on the command line.
inline Graph named_graph(const std::string& name) {
    auto complete = [](int n) {
        std::vector<std::pair<int, int>> e;
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i) e.push_back({i, j});
        return make_graph(n, e);
    };
    auto cycle = [](int n) {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
        return make_graph(n, e);
    };
    auto path = [](int nedges) {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < nedges; ++i) e.push_back({i, i + 1});
        return make_graph(nedges + 1, e);
    };
    if (name == "K3") return complete(3);
    if (name == "K4") return complete(4);
    if (name == "K5") return complete(5);
    if (name == "C4") return cycle(4);
    if (name == "C5") return cycle(5);
    if (name == "P2") return path(2);
    if (name == "P3") return path(3);
    if (name == "paw") return make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}});
    if (name == "path3+v") return make_graph(5, {{0, 1}, {1, 2}, {2, 3}});
    fail("UnknownGraphName", "no built-in graph named '" + name + "'");
}

} // namespace stepcert
