#include "crown/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace crown {

Graph Graph::build(Vertex n, std::span<const Edge> edges, std::size_t* duplicates_collapsed) {
    if (n < 0) throw PreconditionError("vertex count must be nonnegative");
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw PreconditionError("edge endpoint out of range: (" + std::to_string(e.u) +
                                    "," + std::to_string(e.v) + ") with n=" + std::to_string(n));
        if (e.u == e.v)
            throw PreconditionError("self-loop rejected at vertex " + std::to_string(e.u));
        canon.push_back(e.u < e.v ? e : Edge{e.v, e.u});
    }
    std::sort(canon.begin(), canon.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    std::size_t before = canon.size();
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    if (duplicates_collapsed) *duplicates_collapsed = before - canon.size();

    Graph g;
    g.n_ = n;
    g.m_ = static_cast<std::int64_t>(canon.size());
    g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : canon) {
        ++g.offsets_[static_cast<std::size_t>(e.u) + 1];
        ++g.offsets_[static_cast<std::size_t>(e.v) + 1];
    }
    for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
    g.adj_.resize(static_cast<std::size_t>(2 * g.m_));
    std::vector<std::int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : canon) {
        g.adj_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.u)]++)] = e.v;
        g.adj_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.v)]++)] = e.u;
    }
    for (Vertex v = 0; v < n; ++v) {
        auto begin = g.adj_.begin() + g.offsets_[static_cast<std::size_t>(v)];
        auto end = g.adj_.begin() + g.offsets_[static_cast<std::size_t>(v) + 1];
        std::sort(begin, end);
    }
    g.degree_min_ = n > 0 ? g.degree(0) : 0;
    g.degree_max_ = g.degree_min_;
    for (Vertex v = 1; v < n; ++v) {
        Vertex d = g.degree(v);
        g.degree_min_ = std::min(g.degree_min_, d);
        g.degree_max_ = std::max(g.degree_max_, d);
    }
    return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (Vertex u = 0; u < n_; ++u)
        for (Vertex v : neighbors(u))
            if (u < v) out.push_back({u, v});
    return out;
}

std::uint64_t Graph::content_hash() const {
    constexpr std::uint64_t kOffset = 0xcbf29ce484222325ull;
    constexpr std::uint64_t kPrime = 0x100000001b3ull;
    std::uint64_t h = kOffset;
    auto feed = [&h](std::int64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<std::uint64_t>(x >> (8 * i)) & 0xFF;
            h *= kPrime;
        }
    };
    feed(n_);
    feed(m_);
    for (Vertex u = 0; u < n_; ++u)
        for (Vertex v : neighbors(u))
            if (u < v) {
                feed(u);
                feed(v);
            }
    return h;
}

std::int64_t e_count(const Graph& g, const VertexSet& B, const VertexSet& C) {
    std::int64_t total = 0;
    B.for_each([&](Vertex u) {
        for (Vertex v : g.neighbors(u))
            if (C.contains(v)) ++total;
    });
    return total;
}

VertexSet nbhd_N(const Graph& g, const VertexSet& U, const VertexSet& W) {
    if (U.intersects(W))
        throw PreconditionError("nbhd_N requires disjoint U and W; use nbhd_Gamma for overlap");
    return nbhd_Gamma(g, U, W);
}

VertexSet nbhd_N(const Graph& g, const VertexSet& U) {
    return nbhd_Gamma(g, U, U.complement());
}

VertexSet nbhd_Gamma(const Graph& g, const VertexSet& U, const VertexSet& W) {
    VertexSet out(g.num_vertices());
    U.for_each([&](Vertex u) {
        for (Vertex v : g.neighbors(u))
            if (W.contains(v)) out.insert(v);
    });
    return out;
}

VertexSet nbhd_Gamma(const Graph& g, const VertexSet& U) {
    return nbhd_Gamma(g, U, g.full_vertex_set());
}

Graph read_edge_list(std::istream& in) {
    auto next_token_line = [&in](std::string& line) -> bool {
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };
    std::string line;
    if (!next_token_line(line)) throw PreconditionError("edge list: missing header line");
    std::istringstream header(line);
    std::int64_t n = 0, m = 0;
    if (!(header >> n >> m)) throw PreconditionError("edge list: malformed header, expected 'n m'");
    if (n < 0 || m < 0) throw PreconditionError("edge list: negative n or m");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        if (!next_token_line(line))
            throw PreconditionError("edge list: expected " + std::to_string(m) + " edges, got " +
                                    std::to_string(i));
        std::istringstream row(line);
        std::int64_t u = 0, v = 0;
        if (!(row >> u >> v))
            throw PreconditionError("edge list: malformed edge line: '" + line + "'");
        edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    }
    return Graph::build(static_cast<Vertex>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open graph file: " + path);
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.num_vertices() << ' ' << g.num_edges() << '\n';
    for (Vertex u = 0; u < g.num_vertices(); ++u)
        for (Vertex v : g.neighbors(u))
            if (u < v) out << u << ' ' << v << '\n';
}

void write_edge_list_file(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw PreconditionError("cannot open output file: " + path);
    write_edge_list(out, g);
}

}  // namespace crown
