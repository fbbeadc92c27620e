#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "crown/types.hpp"
#include "crown/vertex_set.hpp"

namespace crown {

struct Edge {
    Vertex u;
    Vertex v;
    bool operator==(const Edge&) const = default;
};

// Immutable simple graph on vertices 0..n-1, CSR layout with sorted
// neighbor lists. Safe for concurrent read-only access.
class Graph {
public:
    Graph() = default;

    // Deduplicates edges (count reported through duplicates_collapsed),
    // rejects self-loops and out-of-range endpoints.
    static Graph build(Vertex n, std::span<const Edge> edges,
                       std::size_t* duplicates_collapsed = nullptr);

    Vertex num_vertices() const { return n_; }
    std::int64_t num_edges() const { return m_; }

    Vertex degree(Vertex v) const {
        return static_cast<Vertex>(offsets_[static_cast<std::size_t>(v) + 1] -
                                   offsets_[static_cast<std::size_t>(v)]);
    }
    Vertex degree_min() const { return degree_min_; }
    Vertex degree_max() const { return degree_max_; }
    bool is_regular() const { return degree_min_ == degree_max_; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {adj_.data() + offsets_[static_cast<std::size_t>(v)],
                adj_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
    }

    bool has_edge(Vertex u, Vertex v) const;

    // canonical edge list: u < v, lexicographically sorted
    std::vector<Edge> edge_list() const;

    // FNV-1a 64 over the canonical edge-list text; identifies the graph in
    // certificates
    std::uint64_t content_hash() const;

    VertexSet full_vertex_set() const { return VertexSet::full(n_); }

private:
    Vertex n_ = 0;
    std::int64_t m_ = 0;
    Vertex degree_min_ = 0;
    Vertex degree_max_ = 0;
    std::vector<std::int64_t> offsets_;
    std::vector<Vertex> adj_;
};

// Number of ordered pairs (u,v), u in B, v in C, uv an edge. An edge with
// both endpoints in B∩C contributes twice.
std::int64_t e_count(const Graph& g, const VertexSet& B, const VertexSet& C);

// Neighbors of U inside W; U and W must be disjoint.
VertexSet nbhd_N(const Graph& g, const VertexSet& U, const VertexSet& W);

// N(U) = N(U, V\U)
VertexSet nbhd_N(const Graph& g, const VertexSet& U);

// Vertices of W having a neighbor in U; overlap allowed.
VertexSet nbhd_Gamma(const Graph& g, const VertexSet& U, const VertexSet& W);

// Gamma(U) = Gamma(U, V)
VertexSet nbhd_Gamma(const Graph& g, const VertexSet& U);

// Edge-list text format: header "n m", then one "u v" line per edge,
// 0-based, whitespace-separated; '#' starts a comment.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list_file(const std::string& path, const Graph& g);

}  // namespace crown
