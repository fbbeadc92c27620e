#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crown/graph.hpp"

namespace crown {

enum class CheckMode { exhaustive, sampled };

struct ExpansionCheck {
    bool ok = true;
    bool exact = false;           // exhaustive verdict vs sampled evidence
    std::vector<Vertex> witness;  // violating X when !ok
    std::int64_t checked = 0;
};

// Does G[U] satisfy |N(X, U\X)| >= K|X| for every X inside U with |X| <= s?
// Exhaustive mode enumerates subsets (|U| <= 64 and subset count under cap);
// sampled mode draws random subsets and is evidence, not proof.
ExpansionCheck expanding_check(const Graph& g, const VertexSet& U, Vertex s, double K,
                               CheckMode mode, std::int64_t samples = 2000,
                               std::uint64_t seed = 1,
                               std::int64_t exhaustive_cap = 4'000'000);

struct CleanReport {
    VertexSet u0;
    VertexSet removed;
    int rounds = 0;  // peel waves
};

// Iterated peeling: delete any vertex with fewer than (1-6*delta)/(4*delta)
// neighbors remaining inside U, to exhaustion. The lemma hypotheses
// (|U| >= n/2, lambda/d <= delta) are the caller's to assert; if more than
// delta*n vertices peel, the spectral hypothesis failed and this throws.
CleanReport clean_to_expander(const Graph& g, const VertexSet& U, double delta);

// Tree on nodes 0..size-1 with parent[0] = -1 and parent[i] < i, i.e. a
// build order by successive degree-1 additions.
struct TreeSpec {
    std::vector<int> parent;

    int size() const { return static_cast<int>(parent.size()); }
    int max_degree() const;

    static TreeSpec path(int length);            // length edges, length+1 nodes
    static TreeSpec complete_binary(int depth);  // 2^(depth+1)-1 nodes, heap order
    static TreeSpec star(int leaves);
};

// Double broom T_{ell,t}: path nodes 0..ell with complete binary trees of
// depth t hanging at both path ends.
struct DoubleBroomSpec {
    TreeSpec tree;
    int ell = 0;
    int t = 0;
    int left_root = 0;
    int right_root = 0;
    std::vector<int> path_nodes;
    std::vector<int> left_leaves, right_leaves;

    static DoubleBroomSpec make(int ell, int t);
};

// Greedy extension found no admissible host vertex.
struct ExtensionFailure : StageFailure {
    using StageFailure::StageFailure;
};

enum class ExtendPolicy {
    max_unused_degree,  // maximize candidate's count of unused neighbors, tie lowest id
    first_unused,       // lowest-id unused neighbor
};

// A partial forest embedding into an induced subgraph of the host, with the
// bookkeeping needed to evaluate (s,D)-goodness and to extend/roll back by
// degree-1 vertices.
class PartialEmbedding {
public:
    // Edgeless forest on |targets| nodes mapped bijectively onto targets.
    static PartialEmbedding init(const Graph& host, const VertexSet& universe,
                                 const VertexSet& targets, Vertex goodness_scale,
                                 int degree_cap);

    const Graph& host() const { return *host_; }
    const VertexSet& universe() const { return universe_; }
    const VertexSet& used() const { return used_; }
    Vertex goodness_scale() const { return scale_; }
    int degree_cap() const { return cap_; }

    Vertex forest_size() const { return alive_; }
    bool is_used(Vertex v) const { return used_.contains(v); }
    int node_of(Vertex host_v) const { return phi_inv_[static_cast<std::size_t>(host_v)]; }
    Vertex host_of(int node) const { return nodes_[static_cast<std::size_t>(node)].host; }
    bool node_alive(int node) const { return nodes_[static_cast<std::size_t>(node)].alive; }
    int node_degree(int node) const { return nodes_[static_cast<std::size_t>(node)].degree; }
    int node_parent(int node) const { return nodes_[static_cast<std::size_t>(node)].parent; }
    int node_count() const { return static_cast<int>(nodes_.size()); }  // includes dead ids

    // count of unused universe-neighbors of v (the extension policy's score)
    Vertex unused_degree(Vertex v) const { return unused_deg_[static_cast<std::size_t>(v)]; }

    // policy-ordered admissible host vertices for a new leaf under parent
    std::vector<Vertex> candidates(int parent_node,
                                   ExtendPolicy policy = ExtendPolicy::max_unused_degree) const;

    // attach a new leaf under parent at the policy's first candidate
    int extend_leaf(int parent_node, ExtendPolicy policy = ExtendPolicy::max_unused_degree);

    // attach a new leaf at a specific host vertex (validated)
    int extend_leaf_at(int parent_node, Vertex host_v);

    // remove a forest vertex of degree <= 1 and release its host vertex
    void rollback_leaf(int node);

    // all alive node ids, ascending
    std::vector<int> alive_nodes() const;

private:
    struct Node {
        Vertex host;
        int parent;
        std::vector<int> children;
        int degree = 0;
        bool alive = true;
    };

    PartialEmbedding() = default;
    void use_host(Vertex v);
    void release_host(Vertex v);

    const Graph* host_ = nullptr;
    VertexSet universe_;
    VertexSet used_;
    Vertex scale_ = 0;
    int cap_ = 0;
    Vertex alive_ = 0;
    std::vector<Node> nodes_;
    std::vector<int> phi_inv_;
    std::vector<Vertex> unused_deg_;
};

// Brute-force Definition-2 goodness: enumerates every X in the universe with
// |X| <= scale and checks
//   |Gamma(X) \ phi(F)| >= sum_{v in X} [D - deg_F(phi^-1(v))] + |phi(F) ∩ X|.
// Test oracle; requires |universe| <= 64 and subset count under cap.
bool goodness_exact(const PartialEmbedding& e, std::int64_t subset_cap = 20'000'000);

struct EmbedStats {
    std::int64_t extensions = 0;
    std::int64_t backtracks = 0;
    Vertex peak_forest = 0;
};

// Embed a tree by successive leaf extensions, in node order, with bounded
// candidate backtracking. Node 0 of the spec is the (already embedded)
// attach node. Returns spec-node -> forest-node ids. On failure the
// embedding is restored and ExtensionFailure carries the longest prefix.
std::vector<int> embed_tree(PartialEmbedding& e, const TreeSpec& tree, int attach_node,
                            int backtrack_budget = 32, EmbedStats* stats = nullptr,
                            ExtendPolicy policy = ExtendPolicy::max_unused_degree);

}  // namespace crown
