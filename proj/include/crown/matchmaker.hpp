#pragma once

#include <cstdint>
#include <vector>

#include "crown/graph.hpp"

namespace crown {

// Three disjoint matchmaker sets: every vertex has at least guaranteed_deg
// neighbors in each of s1, s2, s3, and each |si| <= n/(K-2) < delta1*n.
struct MatchmakerTriple {
    VertexSet s1, s2, s3;
    Vertex guaranteed_deg = 0;  // achieved min over vertices and the three sets
    int color_count = 0;        // K
    Vertex threshold = 0;       // floor(d / 2K)
    std::int64_t resamples_used = 0;
};

// Resampling budget exhausted; carries the events still violated.
struct MatchmakerError : std::runtime_error {
    std::vector<std::pair<Vertex, int>> violated_events;  // (vertex, color)
    std::int64_t resamples = 0;
    MatchmakerError(const std::string& what, std::vector<std::pair<Vertex, int>> ev,
                    std::int64_t used)
        : std::runtime_error(what), violated_events(std::move(ev)), resamples(used) {}
};

// Moser-Tardos realization of the Local Lemma splitting: color vertices
// uniformly in K = ceil(2/delta1) colors; while some vertex sees fewer than
// floor(d/2K) neighbors of some color, resample the colors of its closed
// neighborhood (first violated event in (vertex, color) scan order). On
// success the three smallest classes are returned.
MatchmakerTriple split_matchmakers(const Graph& g, double delta1, std::uint64_t seed,
                                   std::int64_t max_resamples);

}  // namespace crown
