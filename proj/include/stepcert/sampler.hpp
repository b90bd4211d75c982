#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stepcert/certifier.hpp"
#include "stepcert/error.hpp"
#include "stepcert/graph.hpp"
#include "stepcert/quad.hpp"
#include "stepcert/rational.hpp"
#include "stepcert/stepkernel.hpp"

namespace stepcert {

namespace detail {

static_assert(sizeof(unsigned long) >= 8, "sampling relies on 64-bit unsigned long");

// SplitMix64: the Steele-Lea-Flajolet update. Stream r of a seed starts at
// state seed + (r+1) * 0xda942042e4dd58b5, so any number of repetitions get
// independent, reproducible word sequences regardless of scheduling.
struct SplitMix64 {
    std::uint64_t state = 0;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

inline SplitMix64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64{seed + (stream + 1) * 0xda942042e4dd58b5ULL};
}

// floor(v * 2^64) clamped to the uint64 range; v must lie in [0,1].
inline std::uint64_t scale64(const Rational& v) {
    BigInt t = (num(v) << 64) / den(v);
    if (t < 0) return 0;
    BigInt cap = (BigInt(1) << 64) - 1;
    if (t > cap) return ~std::uint64_t{0};
    return t.get_ui();
}

// word/2^64 < v, exactly.
inline bool coin_below(std::uint64_t word, const Rational& v) {
    return BigInt(word) * den(v) < (num(v) << 64);
}

// Per-block cumulative thresholds: a uniform word lands in block i when it is
// below cum[i] and at or above cum[i-1]. The final block absorbs the at most
// 2^-64 of mass lost to flooring.
struct BlockFinder {
    std::vector<std::uint64_t> cum;
    explicit BlockFinder(const StepKernel& w) {
        Rational acc = rat(0);
        for (const Rational& width : w.widths) {
            acc += width;
            cum.push_back(scale64(acc));
        }
    }
    std::size_t locate(std::uint64_t word) const {
        auto it = std::upper_bound(cum.begin(), cum.end(), word);
        if (it == cum.end()) return cum.size() - 1;
        return static_cast<std::size_t>(it - cum.begin());
    }
};

inline Rational word_position(std::uint64_t word) {
    return rat(BigInt(word), BigInt(1) << 64);
}

// Delete-1 jackknife of the mean: SE^2 = (R-1)/R * sum (mean_{-r} - mean)^2.
inline std::pair<double, double> jackknife_mean_se(const std::vector<double>& xs) {
    auto r = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    double mean = sum / r;
    double acc = 0.0;
    for (double x : xs) {
        double loo = (sum - x) / (r - 1.0);
        acc += (loo - mean) * (loo - mean);
    }
    return {mean, std::sqrt((r - 1.0) / r * acc)};
}

} // namespace detail

struct SampledGraph {
    long n = 0;
    std::vector<std::vector<bool>> adj;
};

inline long edge_count(const SampledGraph& g) {
    long count = 0;
    for (long i = 0; i < g.n; ++i)
        for (long j = i + 1; j < g.n; ++j)
            if (g.adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ++count;
    return count;
}

inline Graph to_graph(const SampledGraph& g) {
    std::vector<std::pair<int, int>> edges;
    for (long i = 0; i < g.n; ++i)
        for (long j = i + 1; j < g.n; ++j)
            if (g.adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return make_graph(static_cast<int>(g.n), std::move(edges));
}

// W-random graph: vertex i gets an independent uniform position, edge {i,j}
// appears with probability W(x_i, x_j). Draw order: n position words from
// stream 0 of the seed, then pair coins for i < j in row-major order.
inline SampledGraph sample_graph(const StepKernel& w, long n, std::uint64_t seed) {
    require(range_check(w, rat(0), rat(1)), "RangeViolation",
            "sampling needs kernel values in [0,1]");
    require(n >= 2, "BadSampleSize", "need at least two vertices");

    detail::BlockFinder finder(w);
    std::size_t blocks = w.widths.size();
    std::vector<std::vector<std::uint64_t>> thr(blocks, std::vector<std::uint64_t>(blocks));
    std::vector<std::vector<bool>> certain(blocks, std::vector<bool>(blocks));
    for (std::size_t i = 0; i < blocks; ++i)
        for (std::size_t j = 0; j < blocks; ++j) {
            thr[i][j] = detail::scale64(w.values[i][j]);
            certain[i][j] = w.values[i][j] == rat(1);
        }

    detail::SplitMix64 g = detail::stream_rng(seed, 0);
    std::vector<std::size_t> block(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) block[static_cast<std::size_t>(i)] = finder.locate(g.next());

    SampledGraph out{n, std::vector<std::vector<bool>>(static_cast<std::size_t>(n),
                                                       std::vector<bool>(static_cast<std::size_t>(n)))};
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            std::uint64_t coin = g.next();
            auto bi = block[static_cast<std::size_t>(i)];
            auto bj = block[static_cast<std::size_t>(j)];
            bool edge = certain[bi][bj] || coin < thr[bi][bj];
            out.adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = edge;
            out.adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = edge;
        }
    return out;
}

// Same law for W_p + Delta with Delta held as a lazy tensor; kernel values
// are evaluated exactly per pair, and a value outside [0,1] is an error.
inline SampledGraph sample_graph(const LazyTensorKernel& delta, const Rational& p, long n,
                                 std::uint64_t seed) {
    require(n >= 2, "BadSampleSize", "need at least two vertices");
    detail::SplitMix64 g = detail::stream_rng(seed, 0);
    std::vector<Rational> pos(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        pos[static_cast<std::size_t>(i)] = detail::word_position(g.next());

    SampledGraph out{n, std::vector<std::vector<bool>>(static_cast<std::size_t>(n),
                                                       std::vector<bool>(static_cast<std::size_t>(n)))};
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            std::uint64_t coin = g.next();
            Rational v = p + lazy_eval(delta, pos[static_cast<std::size_t>(i)],
                                       pos[static_cast<std::size_t>(j)]);
            require(sign(v) >= 0 && v <= rat(1), "RangeViolation",
                    "perturbed kernel leaves [0,1]");
            bool edge = detail::coin_below(coin, v);
            out.adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = edge;
            out.adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = edge;
        }
    return out;
}

struct SampleReport {
    long n = 0;
    long reps = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::string exact_target; // empty when no exact reference was supplied
    double z_score = 0.0;
    bool below_resolution = false;
    std::string note;
};

namespace detail {

inline SampleReport finish_report(long n, long reps, std::uint64_t seed,
                                  const std::vector<double>& xs, const QuadValue* exact) {
    auto [mean, se] = jackknife_mean_se(xs);
    SampleReport r;
    r.n = n;
    r.reps = reps;
    r.seed = seed;
    r.estimate = mean;
    r.std_error = se;
    if (exact != nullptr) {
        r.exact_target = quad_str(*exact);
        double ex = quad_double(*exact);
        if (se > 0.0)
            r.z_score = (mean - ex) / se;
        else if (mean != ex)
            r.z_score = std::copysign(std::numeric_limits<double>::max(), mean - ex);
    }
    return r;
}

} // namespace detail

// Unbiased estimate of the induced F-density of G(n,W): every repetition
// draws a fresh v(F)-subset of an independent W-random graph (fresh uniform
// positions plus pair coins). The indicator asks for equality with F as a
// labeled graph, matching the integral rho_F(W) = int prod W prod (1-W);
// isomorphic-but-relabeled outcomes would overcount by the number of labeled
// copies of F. Mean is rho_F(W) exactly, for every n >= v(F). Draw order per
// repetition stream: v(F) position words, then pair coins in pairs_of order.
inline SampleReport estimate_induced(const Graph& f, const StepKernel& w, long n, long reps,
                                     std::uint64_t seed, const QuadValue* exact) {
    require(range_check(w, rat(0), rat(1)), "RangeViolation",
            "sampling needs kernel values in [0,1]");
    require(n >= f.order && n >= 2, "BadSampleSize",
            "sample graphs need at least v(F) vertices");
    require(reps >= 2, "BadReps", "need at least two repetitions");

    int k = f.order;
    detail::BlockFinder finder(w);
    std::size_t blocks = w.widths.size();
    std::vector<std::vector<std::uint64_t>> thr(blocks, std::vector<std::uint64_t>(blocks));
    std::vector<std::vector<bool>> certain(blocks, std::vector<bool>(blocks));
    for (std::size_t i = 0; i < blocks; ++i)
        for (std::size_t j = 0; j < blocks; ++j) {
            thr[i][j] = detail::scale64(w.values[i][j]);
            certain[i][j] = w.values[i][j] == rat(1);
        }

    const auto& pairs = detail::pairs_of(k);
    std::uint64_t fmask = 0;
    for (std::size_t b = 0; b < pairs.size(); ++b)
        for (auto [a, c] : f.edges)
            if (std::minmax(a, c) == std::minmax(pairs[b].first, pairs[b].second))
                fmask |= std::uint64_t{1} << b;

    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(reps));
    std::vector<std::size_t> block(static_cast<std::size_t>(k));
    for (long r = 0; r < reps; ++r) {
        detail::SplitMix64 g = detail::stream_rng(seed, static_cast<std::uint64_t>(r));
        for (int i = 0; i < k; ++i) block[static_cast<std::size_t>(i)] = finder.locate(g.next());
        std::uint64_t mask = 0;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            std::uint64_t coin = g.next();
            auto bi = block[static_cast<std::size_t>(pairs[b].first)];
            auto bj = block[static_cast<std::size_t>(pairs[b].second)];
            if (certain[bi][bj] || coin < thr[bi][bj]) mask |= std::uint64_t{1} << b;
        }
        xs.push_back(mask == fmask ? 1.0 : 0.0);
    }
    return detail::finish_report(n, reps, seed, xs, exact);
}

inline SampleReport estimate_induced(const Graph& f, const StepKernel& w, long n, long reps,
                                     std::uint64_t seed) {
    return estimate_induced(f, w, n, reps, seed, nullptr);
}

inline SampleReport estimate_induced(const Graph& f, const StepKernel& w, long n, long reps,
                                     std::uint64_t seed, const QuadValue& exact) {
    return estimate_induced(f, w, n, reps, seed, &exact);
}

// Unbiased estimate of t(H,W): each repetition averages the product of
// kernel values over the edges of H at fresh uniform positions. W may take
// any rational values. Draw order per repetition stream: v(H) position words.
inline SampleReport estimate_t(const Graph& h, const StepKernel& w, long reps,
                               std::uint64_t seed, const QuadValue* exact) {
    require(reps >= 2, "BadReps", "need at least two repetitions");
    detail::BlockFinder finder(w);
    std::size_t blocks = w.widths.size();
    std::vector<std::vector<double>> val(blocks, std::vector<double>(blocks));
    for (std::size_t i = 0; i < blocks; ++i)
        for (std::size_t j = 0; j < blocks; ++j) val[i][j] = w.values[i][j].get_d();

    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(reps));
    std::vector<std::size_t> block(static_cast<std::size_t>(h.order));
    for (long r = 0; r < reps; ++r) {
        detail::SplitMix64 g = detail::stream_rng(seed, static_cast<std::uint64_t>(r));
        for (int i = 0; i < h.order; ++i)
            block[static_cast<std::size_t>(i)] = finder.locate(g.next());
        double prod = 1.0;
        for (auto [a, b] : h.edges)
            prod *= val[block[static_cast<std::size_t>(a)]][block[static_cast<std::size_t>(b)]];
        xs.push_back(prod);
    }
    return detail::finish_report(h.order, reps, seed, xs, exact);
}

inline SampleReport estimate_t(const Graph& h, const StepKernel& w, long reps,
                               std::uint64_t seed) {
    return estimate_t(h, w, reps, seed, nullptr);
}

inline SampleReport estimate_t(const Graph& h, const StepKernel& w, long reps,
                               std::uint64_t seed, const QuadValue& exact) {
    return estimate_t(h, w, reps, seed, &exact);
}

// Monte Carlo cross-check of a certificate: estimates the induced F-density
// under W_p + Delta against the exact value rand + gap. Certified gaps are
// gamma^N-suppressed, so when |gap| < 5 SE the report says the run cannot
// resolve it; the exact pipeline remains the authority either way.
inline SampleReport mc_certificate_report(const Certificate& c, long n, long reps,
                                          std::uint64_t seed) {
    require(n >= c.f.order && n >= 2, "BadSampleSize",
            "sample graphs need at least v(F) vertices");
    require(reps >= 2, "BadReps", "need at least two repetitions");

    LazyTensorKernel delta = lazy_delta(c);
    QuadValue exact = QuadValue(rand_density(c.f, c.p)) + c.gap;
    int k = c.f.order;
    const auto& pairs = detail::pairs_of(k);
    std::uint64_t fmask = 0;
    for (std::size_t b = 0; b < pairs.size(); ++b)
        for (auto [a, d] : c.f.edges)
            if (std::minmax(a, d) == std::minmax(pairs[b].first, pairs[b].second))
                fmask |= std::uint64_t{1} << b;

    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(reps));
    std::vector<Rational> pos(static_cast<std::size_t>(k));
    for (long r = 0; r < reps; ++r) {
        detail::SplitMix64 g = detail::stream_rng(seed, static_cast<std::uint64_t>(r));
        for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(i)] = detail::word_position(g.next());
        std::uint64_t mask = 0;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            std::uint64_t coin = g.next();
            Rational v = c.p + lazy_eval(delta, pos[static_cast<std::size_t>(pairs[b].first)],
                                         pos[static_cast<std::size_t>(pairs[b].second)]);
            require(sign(v) >= 0 && v <= rat(1), "RangeViolation",
                    "perturbed kernel leaves [0,1]");
            if (detail::coin_below(coin, v)) mask |= std::uint64_t{1} << b;
        }
        xs.push_back(mask == fmask ? 1.0 : 0.0);
    }
    SampleReport r = detail::finish_report(n, reps, seed, xs, &exact);
    if (std::fabs(quad_double(c.gap)) < 5.0 * r.std_error) {
        r.below_resolution = true;
        r.note = "gap below statistical resolution";
    }
    return r;
}

} // namespace stepcert
