#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "crown/graph.hpp"
#include "crown/rng.hpp"

using namespace crown;

namespace {

Graph triangle() { return Graph::build(3, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}); }

Graph four_cycle() { return Graph::build(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }

Graph petersen() {
    // outer 5-cycle, inner pentagram, spokes
    std::vector<Edge> e;
    for (Vertex i = 0; i < 5; ++i) {
        e.push_back({i, static_cast<Vertex>((i + 1) % 5)});
        e.push_back({static_cast<Vertex>(5 + i), static_cast<Vertex>(5 + (i + 2) % 5)});
        e.push_back({i, static_cast<Vertex>(5 + i)});
    }
    return Graph::build(10, e);
}

// brute-force ordered-pair edge count straight from the definition
std::int64_t e_count_brute(const Graph& g, const VertexSet& B, const VertexSet& C) {
    std::int64_t total = 0;
    for (Vertex u = 0; u < g.num_vertices(); ++u)
        for (Vertex v = 0; v < g.num_vertices(); ++v)
            if (B.contains(u) && C.contains(v) && g.has_edge(u, v)) ++total;
    return total;
}

}  // namespace

TEST_CASE("build_graph basics") {
    Graph t = triangle();
    CHECK(t.num_vertices() == 3);
    CHECK(t.num_edges() == 3);
    CHECK(t.degree_min() == 2);
    CHECK(t.degree_max() == 2);

    Graph c4 = four_cycle();
    CHECK(c4.degree_min() == 2);
    CHECK(c4.degree_max() == 2);

    Graph p = petersen();
    CHECK(p.num_edges() == 15);
    CHECK(p.degree_min() == 3);
    CHECK(p.degree_max() == 3);
}

TEST_CASE("build_graph rejects bad input, collapses duplicates") {
    CHECK_THROWS_AS(Graph::build(3, std::vector<Edge>{{0, 0}}), PreconditionError);
    CHECK_THROWS_AS(Graph::build(3, std::vector<Edge>{{0, 3}}), PreconditionError);
    CHECK_THROWS_AS(Graph::build(3, std::vector<Edge>{{-1, 2}}), PreconditionError);

    std::size_t dups = 99;
    Graph g = Graph::build(3, std::vector<Edge>{{0, 1}, {1, 0}, {0, 1}, {1, 2}}, &dups);
    CHECK(dups == 2);
    CHECK(g.num_edges() == 2);
}

TEST_CASE("e_count examples and symmetry") {
    Graph t = triangle();
    VertexSet all = t.full_vertex_set();
    CHECK(e_count(t, all, all) == 6);  // 3 edges, each counted twice

    VertexSet b(3), c(3);
    b.insert(0);
    c.insert(1);
    c.insert(2);
    CHECK(e_count(t, b, c) == 2);

    Graph c4 = four_cycle();
    VertexSet all4 = c4.full_vertex_set();
    CHECK(e_count(c4, all4, all4) == 8);
}

TEST_CASE("e_count matches brute force on random sets") {
    Graph p = petersen();
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        VertexSet b(10), c(10);
        for (Vertex v = 0; v < 10; ++v) {
            if (rng.uniform(2)) b.insert(v);
            if (rng.uniform(2)) c.insert(v);
        }
        CHECK(e_count(p, b, c) == e_count_brute(p, b, c));
        CHECK(e_count(p, b, c) == e_count(p, c, b));
    }
}

TEST_CASE("handshake: e(V,V) = 2|E|") {
    for (const Graph& g : {triangle(), four_cycle(), petersen()}) {
        VertexSet all = g.full_vertex_set();
        CHECK(e_count(g, all, all) == 2 * g.num_edges());
    }
}

TEST_CASE("neighborhood operators") {
    Graph c4 = four_cycle();
    VertexSet u(4);
    u.insert(0);
    u.insert(1);
    VertexSet n = nbhd_N(c4, u);
    CHECK(n.count() == 2);
    CHECK(n.contains(2));
    CHECK(n.contains(3));

    Graph t = triangle();
    VertexSet u0(3);
    u0.insert(0);
    VertexSet nt = nbhd_N(t, u0);
    CHECK(nt.count() == 2);

    // Gamma on the triangle: 0 has no neighbor inside {0}
    VertexSet gamma = nbhd_Gamma(t, u0);
    CHECK(gamma.count() == 2);
    CHECK_FALSE(gamma.contains(0));

    VertexSet u01(4);
    u01.insert(0);
    u01.insert(1);
    VertexSet g4 = nbhd_Gamma(c4, u01);
    CHECK(g4.count() == 4);  // 0 and 1 are each other's neighbors

    VertexSet empty(4);
    CHECK(nbhd_Gamma(c4, empty).empty());

    Graph p = petersen();
    VertexSet one(10);
    one.insert(0);
    CHECK(nbhd_N(p, one).count() == 3);
}

TEST_CASE("nbhd_N rejects overlapping arguments") {
    Graph t = triangle();
    VertexSet u(3), w(3);
    u.insert(0);
    w.insert(0);
    w.insert(1);
    CHECK_THROWS_AS(nbhd_N(t, u, w), PreconditionError);
}

TEST_CASE("Gamma(U,W) is a subset of W; N(U,W) = Gamma(U,W) for disjoint sets") {
    Graph p = petersen();
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        VertexSet u(10), w(10);
        for (Vertex v = 0; v < 10; ++v) {
            if (rng.uniform(3) == 0)
                u.insert(v);
            else if (rng.uniform(2))
                w.insert(v);
        }
        VertexSet gamma = nbhd_Gamma(p, u, w);
        CHECK(gamma.is_subset_of(w));
        CHECK(nbhd_N(p, u, w) == gamma);  // u and w disjoint by construction
    }
}

TEST_CASE("edge list round trip") {
    Graph p = petersen();
    std::stringstream ss;
    write_edge_list(ss, p);
    Graph q = read_edge_list(ss);
    CHECK(q.num_vertices() == p.num_vertices());
    CHECK(q.edge_list() == p.edge_list());
    CHECK(q.content_hash() == p.content_hash());
}

TEST_CASE("edge list parses comments and rejects malformed input") {
    std::stringstream ok("# comment\n3 2\n0 1\n# another\n1 2\n");
    Graph g = read_edge_list(ok);
    CHECK(g.num_edges() == 2);

    std::stringstream truncated("3 5\n0 1\n");
    CHECK_THROWS_AS(read_edge_list(truncated), PreconditionError);

    std::stringstream junk("nope\n");
    CHECK_THROWS_AS(read_edge_list(junk), PreconditionError);
}

TEST_CASE("vertex set operations") {
    VertexSet a(100), b(100);
    for (Vertex v = 0; v < 100; v += 3) a.insert(v);
    for (Vertex v = 0; v < 100; v += 5) b.insert(v);
    VertexSet i = a & b;
    i.for_each([](Vertex v) { CHECK(v % 15 == 0); });
    CHECK(i.count() == 7);  // 0,15,...,90
    CHECK((a | b).count() == a.count() + b.count() - i.count());
    CHECK(a.minus(b).count() == a.count() - i.count());
    CHECK(a.complement().count() == 100 - a.count());
    CHECK(i.is_subset_of(a));
    CHECK(i.is_subset_of(b));
}
