#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crown/certify.hpp"
#include "crown/embedder.hpp"
#include "crown/graph.hpp"
#include "crown/matchmaker.hpp"
#include "crown/spectral.hpp"

namespace crown {

struct Budgets {
    std::int64_t resample_factor = 10;      // max matchmaker resamples = factor * n
    int backtrack = 32;                     // candidate retries per tree embedding
    double consumption_cap_factor = 70.0;   // serpent peak forest <= factor * delta * n
    double broom_cap_factor = 78.0;         // |V(T1)| <= factor * delta * n
};

struct RunConfig {
    double delta = 0.001;
    std::optional<double> delta1;  // defaults to 48*delta
    std::uint64_t seed = 0;
    Budgets budgets;
    bool force = false;        // skip the lambda/d <= delta gate
    int audit_samples = 64;    // sampled expansion audits per stage
    Vertex dense_cap = 256;    // spectral dense-exact fallback bound
    double lambda_tol = 1e-7;  // power-iteration settle tolerance

    double effective_delta1() const { return delta1.value_or(48.0 * delta); }
};

struct StageStat {
    std::string name;
    std::vector<std::pair<std::string, double>> nums;
    std::vector<std::pair<std::string, std::string>> notes;

    void num(const std::string& k, double v) { nums.emplace_back(k, v); }
    void note(const std::string& k, const std::string& v) { notes.emplace_back(k, v); }
};

// Stage 2 output: a path containing S2 with endpoints in S2, and the merge
// edges whose deletion leaves the (s,3)-good forest.
struct Serpent {
    std::vector<Vertex> path;  // host vertices in path order
    Vertex a1 = -1, b1 = -1;   // endpoints
    std::vector<Edge> deleted_edges;  // E_1
    std::int64_t length = 0;          // number of path edges
};

struct Brush {
    Vertex root = -1;
    std::vector<Vertex> vertices;             // including the root
    std::vector<std::pair<Vertex, Vertex>> parent;  // (vertex, its parent toward root)
    std::vector<Vertex> leaves;               // depth-t leaf images
    Vertex parent_of(Vertex v) const;
};

struct DoubleBroom {
    std::vector<Vertex> path;  // root-to-root host path
    int t = 0;
    Brush left, right;
    std::int64_t total_vertices() const {
        return static_cast<std::int64_t>(path.size()) +
               static_cast<std::int64_t>(left.vertices.size()) - 1 +
               static_cast<std::int64_t>(right.vertices.size()) - 1;
    }
};

struct SerpentResult {
    Serpent serpent;
    PartialEmbedding embedding;  // good embedding of path-minus-deleted-edges
    StageStat stats;
};

// Stage 2: merge the S2 singletons into one path by repeatedly growing
// binary trees from path endpoints, connecting two leaf sets by a host edge,
// and rolling the unused growth back.
SerpentResult build_serpent(const Graph& g, const VertexSet& V1, const VertexSet& S2,
                            double delta, const Budgets& budgets);

// Stage 3: extend the serpent into the double broom T1 (depth-t brushes at
// both endpoints), on the serpent's embedding.
DoubleBroom grow_double_broom(const Graph& g, SerpentResult& sr, int t, const Budgets& budgets,
                              double delta, StageStat* stat = nullptr);

// Stage 4: clean U to an expander and embed the second broom T_{ell2,t} in it.
DoubleBroom embed_second_broom(const Graph& g, const VertexSet& U, std::int64_t ell2, int t,
                               double delta, const Budgets& budgets, std::uint64_t seed,
                               StageStat* stat = nullptr);

// Stage 5: close the two brooms into a simple cycle of length ceil(n/2).
std::vector<Vertex> close_cycle(const Graph& g, const DoubleBroom& t1, const DoubleBroom& t2,
                                double delta, StageStat* stat = nullptr);

// Stage 6: maximum matching between the cycle and its complement; fails with
// a Hall violator witness when the matching is deficient.
std::vector<Edge> spike_matching(const Graph& g, const std::vector<Vertex>& cycle,
                                 StageStat* stat = nullptr);

struct PipelineResult {
    Crown crown;
    SquareHamiltonCertificate square_order;
    SpectralCertificate spectral;
    MatchmakerTriple matchmakers;
    std::vector<StageStat> stages;
};

// Theorem-2 pipeline: spectral gate, matchmakers, serpent, brooms, cycle,
// spikes; every stage re-verified before the next.
PipelineResult run_pipeline(const Graph& g, const RunConfig& config);

}  // namespace crown
