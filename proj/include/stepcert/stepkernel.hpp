#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "stepcert/error.hpp"
#include "stepcert/graph.hpp"
#include "stepcert/quad.hpp"
#include "stepcert/rational.hpp"

namespace stepcert {

// Symmetric step function on [0,1]^2: value on block i x j is values[i][j],
// block i having measure widths[i].
struct StepKernel {
    std::vector<Rational> widths;
    std::vector<std::vector<Rational>> values;

    friend bool operator==(const StepKernel& a, const StepKernel& b) {
        return a.widths == b.widths && a.values == b.values;
    }
};

inline StepKernel make_step_kernel(std::vector<Rational> widths,
                                   std::vector<std::vector<Rational>> values) {
    require(!widths.empty(), "MalformedKernel", "kernel needs at least one block");
    Rational total = 0;
    for (const Rational& w : widths) {
        require(sign(w) > 0, "MalformedKernel", "block widths must be positive");
        total += w;
    }
    require(total == rat(1), "MalformedKernel", "block widths must sum to 1");
    require(values.size() == widths.size(), "MalformedKernel", "value matrix has wrong size");
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(values[i].size() == widths.size(), "MalformedKernel",
                "value matrix has wrong size");
        for (std::size_t j = 0; j < i; ++j)
            require(values[i][j] == values[j][i], "MalformedKernel",
                    "value matrix must be symmetric");
    }
    return StepKernel{std::move(widths), std::move(values)};
}

inline StepKernel constant(const Rational& p) { return StepKernel{{rat(1)}, {{p}}}; }

inline StepKernel scale(const Rational& c, const StepKernel& w) {
    StepKernel out = w;
    for (auto& row : out.values)
        for (Rational& v : row) v *= c;
    return out;
}

namespace detail {

inline std::vector<Rational> block_starts(const StepKernel& w) {
    std::vector<Rational> starts(w.widths.size());
    Rational acc = 0;
    for (std::size_t i = 0; i < w.widths.size(); ++i) {
        starts[i] = acc;
        acc += w.widths[i];
    }
    return starts;
}

inline std::size_t locate_block(const StepKernel& w, const Rational& x) {
    require(sign(x) >= 0 && x <= rat(1), "OutOfDomain", "point outside [0,1]");
    Rational acc = 0;
    for (std::size_t i = 0; i + 1 < w.widths.size(); ++i) {
        acc += w.widths[i];
        if (x < acc) return i;
    }
    return w.widths.size() - 1;
}

inline void check_budget(std::size_t blocks, int vertices, long budget) {
    require(int_pow(BigInt(static_cast<long>(blocks)),
                    static_cast<unsigned long>(vertices)) <= BigInt(budget),
            "BlockBudgetExceeded", "block count to the power of vertex count exceeds budget");
}

} // namespace detail

inline Rational eval_at(const StepKernel& w, const Rational& x, const Rational& y) {
    return w.values[detail::locate_block(w, x)][detail::locate_block(w, y)];
}

// Both kernels re-expressed over the union of their block boundaries.
inline std::pair<StepKernel, StepKernel> refine_to_common(const StepKernel& u,
                                                          const StepKernel& w) {
    std::vector<Rational> cuts;
    for (const StepKernel* k : {&u, &w}) {
        Rational acc = 0;
        for (const Rational& wd : k->widths) {
            acc += wd;
            cuts.push_back(acc);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Rational> widths;
    std::vector<std::size_t> iu, iw;
    Rational prev = 0;
    for (const Rational& c : cuts) {
        widths.push_back(c - prev);
        iu.push_back(detail::locate_block(u, prev));
        iw.push_back(detail::locate_block(w, prev));
        prev = c;
    }
    auto remap = [&](const StepKernel& k, const std::vector<std::size_t>& idx) {
        std::vector<std::vector<Rational>> vals(widths.size(),
                                                std::vector<Rational>(widths.size()));
        for (std::size_t i = 0; i < widths.size(); ++i)
            for (std::size_t j = 0; j < widths.size(); ++j)
                vals[i][j] = k.values[idx[i]][idx[j]];
        return make_step_kernel(widths, std::move(vals));
    };
    return {remap(u, iu), remap(w, iw)};
}

inline StepKernel add(const StepKernel& u, const StepKernel& w) {
    auto [ru, rw] = refine_to_common(u, w);
    for (std::size_t i = 0; i < ru.values.size(); ++i)
        for (std::size_t j = 0; j < ru.values.size(); ++j) ru.values[i][j] += rw.values[i][j];
    return ru;
}

// Tensor blocks are pairs (i,j), i from u major, j from w minor; this fixes
// the measure-preserving pairing as mixed-radix digit decomposition of [0,1].
inline StepKernel tensor(const StepKernel& u, const StepKernel& w) {
    std::size_t bu = u.widths.size(), bw = w.widths.size();
    std::vector<Rational> widths(bu * bw);
    std::vector<std::vector<Rational>> vals(bu * bw, std::vector<Rational>(bu * bw));
    for (std::size_t i = 0; i < bu; ++i)
        for (std::size_t j = 0; j < bw; ++j) widths[i * bw + j] = u.widths[i] * w.widths[j];
    for (std::size_t i = 0; i < bu; ++i)
        for (std::size_t j = 0; j < bw; ++j)
            for (std::size_t k = 0; k < bu; ++k)
                for (std::size_t l = 0; l < bw; ++l)
                    vals[i * bw + j][k * bw + l] = u.values[i][k] * w.values[j][l];
    return make_step_kernel(std::move(widths), std::move(vals));
}

// Exact homomorphism density: sum over block assignments of the vertex set.
inline Rational t_hom(const Graph& h, const StepKernel& w, long budget = 100000000) {
    require(min_degree(h) >= 1, "IsolatedVertex",
            "t_hom requires a graph without isolated vertices");
    std::size_t b = w.widths.size();
    detail::check_budget(b, h.order, budget);
    std::vector<std::vector<int>> back(static_cast<std::size_t>(h.order));
    for (auto [x, y] : h.edges) back[static_cast<std::size_t>(y)].push_back(x);
    std::vector<std::size_t> at(static_cast<std::size_t>(h.order), 0);
    Rational total = 0;
    auto rec = [&](auto&& self, int d, const Rational& partial) -> void {
        if (d == h.order) {
            total += partial;
            return;
        }
        for (std::size_t blk = 0; blk < b; ++blk) {
            at[static_cast<std::size_t>(d)] = blk;
            Rational f = partial * w.widths[blk];
            for (int u : back[static_cast<std::size_t>(d)]) {
                f *= w.values[at[static_cast<std::size_t>(u)]][blk];
                if (sign(f) == 0) break;
            }
            if (sign(f) != 0) self(self, d + 1, f);
        }
    };
    rec(rec, 0, rat(1));
    return total;
}

// Exact induced density: edges contribute W, non-edges contribute 1-W.
inline Rational rho_induced(const Graph& f, const StepKernel& w, long budget = 100000000) {
    std::size_t b = w.widths.size();
    detail::check_budget(b, f.order, budget);
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(f.order),
                                       std::vector<bool>(static_cast<std::size_t>(f.order)));
    for (auto [x, y] : f.edges)
        adj[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] =
            adj[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = true;
    std::vector<std::size_t> at(static_cast<std::size_t>(f.order), 0);
    Rational total = 0;
    auto rec = [&](auto&& self, int d, const Rational& partial) -> void {
        if (d == f.order) {
            total += partial;
            return;
        }
        for (std::size_t blk = 0; blk < b; ++blk) {
            at[static_cast<std::size_t>(d)] = blk;
            Rational fac = partial * w.widths[blk];
            for (int u = 0; u < d && sign(fac) != 0; ++u) {
                const Rational& v = w.values[at[static_cast<std::size_t>(u)]][blk];
                fac *= adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)]
                           ? v
                           : rat(1) - v;
            }
            if (sign(fac) != 0) self(self, d + 1, fac);
        }
    };
    rec(rec, 0, rat(1));
    return total;
}

inline Rational edge_density(const StepKernel& w) {
    Rational total = 0;
    for (std::size_t i = 0; i < w.widths.size(); ++i)
        for (std::size_t j = 0; j < w.widths.size(); ++j)
            total += w.widths[i] * w.widths[j] * w.values[i][j];
    return total;
}

inline bool is_balanced(const StepKernel& w) {
    for (std::size_t i = 0; i < w.widths.size(); ++i) {
        Rational row = 0;
        for (std::size_t j = 0; j < w.widths.size(); ++j) row += w.widths[j] * w.values[i][j];
        if (sign(row) != 0) return false;
    }
    return true;
}

inline bool range_check(const StepKernel& w, const Rational& lo, const Rational& hi) {
    for (const auto& row : w.values)
        for (const Rational& v : row)
            if (v < lo || v > hi) return false;
    return true;
}

// Tensor product kept as its factor list: scalar * factor_1 x ... x factor_n.
struct LazyTensorKernel {
    std::vector<StepKernel> factors;
    Rational scalar;
};

inline Rational lazy_eval(const LazyTensorKernel& k, Rational x, Rational y) {
    require(!k.factors.empty(), "MalformedKernel", "lazy kernel needs at least one factor");
    Rational out = k.scalar;
    for (const StepKernel& f : k.factors) {
        std::size_t bx = detail::locate_block(f, x);
        std::size_t by = detail::locate_block(f, y);
        out *= f.values[bx][by];
        auto starts = detail::block_starts(f);
        x = (x - starts[bx]) / f.widths[bx];
        y = (y - starts[by]) / f.widths[by];
    }
    return out;
}

inline QuadValue lazy_t_hom(const Graph& h, const LazyTensorKernel& k,
                            long budget = 100000000) {
    require(!k.factors.empty(), "MalformedKernel", "lazy kernel needs at least one factor");
    Rational out = rat_pow(k.scalar, static_cast<unsigned long>(h.edges.size()));
    // Runs of equal factors share one density computation.
    for (std::size_t i = 0; i < k.factors.size();) {
        std::size_t j = i + 1;
        while (j < k.factors.size() && k.factors[j] == k.factors[i]) ++j;
        out *= rat_pow(t_hom(h, k.factors[i], budget), static_cast<unsigned long>(j - i));
        i = j;
    }
    return QuadValue(out);
}

} // namespace stepcert
