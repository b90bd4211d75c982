#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "stepcert/graph.hpp"
#include "stepcert/rational.hpp"

using namespace stepcert;

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Graph random_graph(int order, std::uint64_t seed) {
    std::vector<std::pair<int, int>> edges;
    int t = 0;
    for (int j = 1; j < order; ++j)
        for (int i = 0; i < j; ++i, ++t)
            if (mix64(seed * 131 + static_cast<std::uint64_t>(t)) & 1) edges.push_back({i, j});
    return make_graph(order, edges);
}

Graph permuted(const Graph& g, std::uint64_t seed) {
    std::vector<int> perm(static_cast<std::size_t>(g.order));
    for (int i = 0; i < g.order; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = g.order - 1; i > 0; --i) {
        int j = static_cast<int>(mix64(seed + static_cast<std::uint64_t>(i)) %
                                 static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : g.edges) edges.push_back({perm[static_cast<std::size_t>(a)],
                                                 perm[static_cast<std::size_t>(b)]});
    return make_graph(g.order, edges);
}

Graph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return make_graph(n, e);
}

Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) e.push_back({i, j});
    return make_graph(n, e);
}

Graph path_with_edges(int k) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < k; ++i) e.push_back({i, i + 1});
    return make_graph(k + 1, e);
}

} // namespace

TEST_CASE("graph construction validates and normalizes") {
    Graph g = make_graph(3, {{2, 1}, {0, 1}});
    CHECK(g.order == 3);
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

    CHECK_THROWS_AS(make_graph(0, {}), Error);
    CHECK_THROWS_AS(make_graph(3, {{1, 1}}), Error);
    CHECK_THROWS_AS(make_graph(3, {{0, 1}, {1, 0}}), Error);
    CHECK_THROWS_AS(make_graph(3, {{0, 3}}), Error);
}

TEST_CASE("canonical_form identifies isomorphic graphs") {
    Graph p1 = make_graph(3, {{0, 1}, {1, 2}});
    Graph p2 = make_graph(3, {{0, 2}, {2, 1}});
    CHECK(canonical_form(p1) == canonical_form(p2));
    CHECK(canonical_form(p1) != canonical_form(complete(3)));

    // K3 is vertex-transitive: its canonical representative is itself.
    CanonGraph k3 = canonical_form(complete(3));
    CHECK(k3.order == 3);
    CHECK(k3.edges == complete(3).edges);

    // C5 is self-complementary.
    CHECK(canonical_form(cycle(5)) == canonical_form(complement(cycle(5))));
    CHECK(canonical_form(cycle(6)) != canonical_form(complement(cycle(6))));

    CHECK_THROWS_AS(canonical_form(random_graph(10, 1)), Error);

    // Canonical representative is a fixed point of canonicalization.
    for (std::uint64_t s = 0; s < 50; ++s) {
        Graph g = random_graph(2 + static_cast<int>(s % 6), s);
        CanonGraph c = canonical_form(g);
        CHECK(canonical_form(c.to_graph()) == c);
    }
}

TEST_CASE("canonical_form is relabeling-invariant at every supported order") {
    for (int order = 2; order <= 7; ++order)
        for (std::uint64_t s = 0; s < 50; ++s) {
            Graph g = random_graph(order, s * 7919 + static_cast<std::uint64_t>(order));
            Graph h = permuted(g, s * 104729 + 5);
            CHECK(canonical_form(g) == canonical_form(h));
        }
    for (int order = 8; order <= 9; ++order)
        for (std::uint64_t s = 0; s < 25; ++s) {
            Graph g = random_graph(order, s * 7919 + static_cast<std::uint64_t>(order));
            Graph h = permuted(g, s * 104729 + 5);
            CHECK(canonical_form(g) == canonical_form(h));
        }
}

TEST_CASE("enumerate_H matches known isomorphism-class counts") {
    // Classes with >=1 edge and no isolated vertices on <= m vertices; the
    // count is (number of graphs on m unlabeled vertices) - 1 by the
    // pad-with-isolated-vertices bijection: 4,11,34,156,1044,12346 give these.
    std::vector<CanonGraph> h3 = enumerate_H(3);
    CHECK(h3.size() == 3);
    std::set<CanonGraph> want = {canonical_form(complete(2)),
                                 canonical_form(path_with_edges(2)),
                                 canonical_form(complete(3))};
    CHECK(std::set<CanonGraph>(h3.begin(), h3.end()) == want);

    CHECK(enumerate_H(4).size() == 10);
    CHECK(enumerate_H(5).size() == 33);
    CHECK(enumerate_H(6).size() == 155);
    CHECK(enumerate_H(7).size() == 1043);

    std::size_t prev = 0;
    for (int m = 3; m <= 7; ++m) {
        std::size_t n = enumerate_H(m).size();
        CHECK(n > prev);
        prev = n;
    }

    CHECK_THROWS_AS(enumerate_H(2), Error);
    CHECK_THROWS_AS(enumerate_H(10), Error);
}

TEST_CASE("enumerate_H(4) restricted to min degree 2 gives the four base graphs") {
    std::set<CanonGraph> got;
    for (const CanonGraph& h : enumerate_H(4))
        if (min_degree(h.to_graph()) >= 2) got.insert(h);
    Graph diamond = make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
    std::set<CanonGraph> want = {canonical_form(complete(3)), canonical_form(cycle(4)),
                                 canonical_form(diamond), canonical_form(complete(4))};
    CHECK(got == want);
}

TEST_CASE("enumerate_H(8) covers all classes on up to eight vertices") {
    CHECK(enumerate_H(8).size() == 12345);
}

TEST_CASE("degree, clique, complement helpers") {
    CHECK(min_degree(cycle(4)) == 2);
    CHECK(min_degree(path_with_edges(3)) == 1);
    CHECK(min_degree(make_graph(1, {})) == 0);
    CHECK(is_clique(complete(5)));
    CHECK(!is_clique(cycle(4)));
    CHECK(is_clique(make_graph(1, {})));

    Graph c5 = cycle(5);
    Graph c5bar = complement(c5);
    CHECK(c5bar.order == 5);
    CHECK(c5bar.edges.size() == 5);
    for (auto e : c5bar.edges)
        CHECK(std::find(c5.edges.begin(), c5.edges.end(), e) == c5.edges.end());
    CHECK(complement(complement(cycle(5))).edges == cycle(5).edges);
}

TEST_CASE("count_nj reproduces the worked examples") {
    Graph path3v = make_graph(5, {{0, 1}, {1, 2}, {2, 3}});

    CHECK(count_nj(complete(3), path3v) == std::vector<long>{0, 2, 5, 3});
    CHECK(count_nj(path_with_edges(2), cycle(5)) == std::vector<long>{5, 20, 5});
    // Each of the 5 four-vertex subsets of V(C5) carries exactly three
    // 4-cycles, using 3, 2, 1 cycle edges (j = 1, 2, 3); K5 has 15 four-cycles
    // in total, which pins the sum. A recorded value of (0,5,0,5,0) floating
    // around for this pair contradicts both counts.
    CHECK(count_nj(cycle(4), cycle(5)) == std::vector<long>{0, 5, 5, 5, 0});
    // Triangles in K5 split by how many of their pairs C5 misses: 5 use two
    // cycle edges, 5 use one, and C5 and its complement are triangle-free.
    CHECK(count_nj(complete(3), cycle(5)) == std::vector<long>{0, 5, 5, 0});

    CHECK(count_nj(complete(4), complete(4)) ==
          std::vector<long>{1, 0, 0, 0, 0, 0, 0});
    CHECK(count_nj(complete(3), complete(4)) == std::vector<long>{4, 0, 0, 0});

    CHECK_THROWS_AS(count_nj(complete(5), complete(4)), Error);
    CHECK_THROWS_AS(count_nj(make_graph(3, {{0, 1}}), complete(4)), Error);
}

TEST_CASE("count_nj partitions pair subsets across classes") {
    for (int m = 3; m <= 5; ++m)
        for (std::uint64_t s = 0; s < 4; ++s) {
            Graph f = random_graph(m, 999 * s + static_cast<std::uint64_t>(m));
            int npairs = m * (m - 1) / 2;
            std::map<int, BigInt> total;
            for (const CanonGraph& h : enumerate_H(m)) {
                Graph hg = h.to_graph();
                int t = static_cast<int>(hg.edges.size());
                BigInt sum = 0;
                for (long v : count_nj(hg, f)) sum += v;
                total[t] += sum;
            }
            for (int t = 1; t <= npairs; ++t)
                CHECK(total[t] == binomial(npairs, t));
        }
}

TEST_CASE("count_nj edge/non-edge duality under complement") {
    for (int m = 4; m <= 5; ++m)
        for (std::uint64_t s = 0; s < 3; ++s) {
            Graph f = random_graph(m, 4242 * s + static_cast<std::uint64_t>(m));
            for (const CanonGraph& h : enumerate_H(m)) {
                Graph hg = h.to_graph();
                std::vector<long> a = count_nj(hg, f);
                std::vector<long> b = count_nj(hg, complement(f));
                std::reverse(b.begin(), b.end());
                CHECK(a == b);
            }
        }
    // Self-complementary F forces a palindromic profile.
    std::vector<long> nj = count_nj(path_with_edges(2), cycle(5));
    std::vector<long> rev = nj;
    std::reverse(rev.begin(), rev.end());
    CHECK(nj == rev);
}

TEST_CASE("graph6 encoding round-trips and matches the format") {
    CHECK(to_graph6(make_graph(1, {})) == "@");
    CHECK(to_graph6(complete(3)) == "Bw");
    CHECK(to_graph6(complete(4)) == "C~");
    CHECK(parse_graph6("Bw").edges == complete(3).edges);

    for (std::uint64_t s = 0; s < 200; ++s) {
        Graph g = random_graph(1 + static_cast<int>(s % 9), s * 31 + 7);
        Graph h = parse_graph6(to_graph6(g));
        CHECK(h.order == g.order);
        CHECK(h.edges == g.edges);
    }

    CHECK_THROWS_AS(parse_graph6(""), Error);
    CHECK_THROWS_AS(parse_graph6("B"), Error);       // truncated edge bits
    CHECK_THROWS_AS(parse_graph6("Bww"), Error);     // trailing garbage
    CHECK_THROWS_AS(parse_graph6("?"), Error);       // order 0
    CHECK_THROWS_AS(parse_graph6("I~~~~~~~~"), Error); // order 10 > limit
    CHECK_THROWS_AS(parse_graph6("B\x1f"), Error);   // byte below printable range
    CHECK_THROWS_AS(parse_graph6("Bx"), Error);      // nonzero padding bits
}

TEST_CASE("named graph lookup") {
    CHECK(named_graph("K3").edges == complete(3).edges);
    CHECK(named_graph("K4").edges == complete(4).edges);
    CHECK(named_graph("K5").edges == complete(5).edges);
    CHECK(canonical_form(named_graph("C4")) == canonical_form(cycle(4)));
    CHECK(canonical_form(named_graph("C5")) == canonical_form(cycle(5)));
    CHECK(named_graph("P2").edges == path_with_edges(2).edges);
    CHECK(named_graph("P3").edges == path_with_edges(3).edges);

    Graph paw = named_graph("paw");
    CHECK(paw.order == 4);
    CHECK(paw.edges.size() == 4);
    CHECK(min_degree(paw) == 1);
    bool has_triangle = count_nj(complete(3), paw)[0] > 0;
    CHECK(has_triangle);

    Graph p3v = named_graph("path3+v");
    CHECK(p3v.order == 5);
    CHECK(p3v.edges.size() == 3);
    CHECK(min_degree(p3v) == 0);
    CHECK(canonical_form(p3v) != canonical_form(named_graph("P3")));

    CHECK_THROWS_AS(named_graph("K10"), Error);
    CHECK_THROWS_AS(named_graph(""), Error);
}
