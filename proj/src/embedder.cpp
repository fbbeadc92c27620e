#include "crown/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "crown/rng.hpp"

namespace crown {

// ---------------------------------------------------------------- expansion

ExpansionCheck expanding_check(const Graph& g, const VertexSet& U, Vertex s, double K,
                               CheckMode mode, std::int64_t samples, std::uint64_t seed,
                               std::int64_t exhaustive_cap) {
    ExpansionCheck out;
    if (s <= 0) {
        out.ok = true;
        out.exact = true;
        return out;
    }
    std::vector<Vertex> members = U.to_vector();
    const auto u_size = static_cast<Vertex>(members.size());

    if (mode == CheckMode::exhaustive) {
        if (u_size > 64)
            throw PreconditionError("exhaustive expanding_check limited to |U| <= 64");
        double combos = 0.0;
        double binom = 1.0;
        for (Vertex j = 1; j <= std::min(s, u_size); ++j) {
            binom = binom * static_cast<double>(u_size - j + 1) / static_cast<double>(j);
            combos += binom;
            if (combos > static_cast<double>(exhaustive_cap))
                throw PreconditionError("exhaustive expanding_check: subset count exceeds cap");
        }
        // neighbor masks within U
        std::vector<std::uint64_t> adj(members.size(), 0);
        std::vector<int> index_of(static_cast<std::size_t>(g.num_vertices()), -1);
        for (std::size_t i = 0; i < members.size(); ++i)
            index_of[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
        for (std::size_t i = 0; i < members.size(); ++i)
            for (Vertex w : g.neighbors(members[i]))
                if (index_of[static_cast<std::size_t>(w)] >= 0)
                    adj[i] |= std::uint64_t{1} << index_of[static_cast<std::size_t>(w)];

        // DFS over subsets in index order
        struct Frame {
            int next;
            std::uint64_t gamma;
            std::uint64_t xmask;
        };
        std::vector<Frame> frames;
        frames.push_back({0, 0, 0});
        while (!frames.empty()) {
            Frame f = frames.back();
            frames.pop_back();
            // expand children: add member f.next.. as next element
            for (int i = f.next; i < static_cast<int>(members.size()); ++i) {
                std::uint64_t xmask = f.xmask | (std::uint64_t{1} << i);
                std::uint64_t gamma = f.gamma | adj[static_cast<std::size_t>(i)];
                int xsz = std::popcount(xmask);
                ++out.checked;
                if (static_cast<double>(std::popcount(gamma & ~xmask)) <
                    K * static_cast<double>(xsz)) {
                    for (int b = 0; b < static_cast<int>(members.size()); ++b)
                        if (xmask & (std::uint64_t{1} << b))
                            out.witness.push_back(members[static_cast<std::size_t>(b)]);
                    out.ok = false;
                    out.exact = true;
                    return out;
                }
                if (xsz < s) frames.push_back({i + 1, gamma, xmask});
            }
        }
        out.ok = true;
        out.exact = true;
        return out;
    }

    // sampled
    if (u_size == 0) {
        out.ok = true;
        return out;
    }
    Rng rng(Rng::mix(seed ^ 0xE4Aull));
    std::vector<Vertex> pool = members;
    for (std::int64_t it = 0; it < samples; ++it) {
        Vertex j = static_cast<Vertex>(1 + rng.uniform(static_cast<std::uint64_t>(
                                               std::min<Vertex>(s, u_size))));
        for (Vertex i = 0; i < j; ++i) {
            std::size_t k = static_cast<std::size_t>(i) +
                            static_cast<std::size_t>(rng.uniform(
                                static_cast<std::uint64_t>(u_size - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[k]);
        }
        VertexSet X = VertexSet::of(g.num_vertices(),
                                    std::span<const Vertex>(pool.data(), static_cast<std::size_t>(j)));
        VertexSet outside = nbhd_Gamma(g, X, U.minus(X));
        ++out.checked;
        if (static_cast<double>(outside.count()) < K * static_cast<double>(j)) {
            out.ok = false;
            out.witness = X.to_vector();
            return out;
        }
    }
    return out;
}

// ----------------------------------------------------------------- cleaning

CleanReport clean_to_expander(const Graph& g, const VertexSet& U, double delta) {
    if (!(delta > 0.0))
        throw PreconditionError("clean_to_expander: delta must be positive");
    // for delta >= 1/6 the threshold is <= 0 and nothing can peel
    const double threshold = (1.0 - 6.0 * delta) / (4.0 * delta);
    const double dn = delta * static_cast<double>(g.num_vertices());

    CleanReport report;
    report.u0 = U;
    report.removed = VertexSet(g.num_vertices());

    std::vector<Vertex> deg_in(static_cast<std::size_t>(g.num_vertices()), 0);
    U.for_each([&](Vertex v) {
        Vertex c = 0;
        for (Vertex w : g.neighbors(v))
            if (U.contains(w)) ++c;
        deg_in[static_cast<std::size_t>(v)] = c;
    });

    std::vector<Vertex> wave;
    U.for_each([&](Vertex v) {
        if (static_cast<double>(deg_in[static_cast<std::size_t>(v)]) < threshold)
            wave.push_back(v);
    });

    while (!wave.empty()) {
        ++report.rounds;
        std::vector<Vertex> next;
        for (Vertex v : wave) {
            if (!report.u0.contains(v)) continue;
            report.u0.erase(v);
            report.removed.insert(v);
            for (Vertex w : g.neighbors(v)) {
                if (!report.u0.contains(w)) continue;
                if (static_cast<double>(--deg_in[static_cast<std::size_t>(w)]) < threshold)
                    next.push_back(w);
            }
        }
        wave = std::move(next);
        if (static_cast<double>(report.removed.count()) > dn)
            throw StageFailure("clean_to_expander",
                               "peeled more than delta*n vertices (" +
                                   std::to_string(report.removed.count()) +
                                   " > " + std::to_string(dn) +
                                   "); the spectral hypothesis fails for this input");
    }
    return report;
}

// --------------------------------------------------------------- tree specs

int TreeSpec::max_degree() const {
    std::vector<int> deg(parent.size(), 0);
    for (std::size_t i = 1; i < parent.size(); ++i) {
        ++deg[static_cast<std::size_t>(parent[i])];
        ++deg[i];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

TreeSpec TreeSpec::path(int length) {
    TreeSpec t;
    t.parent.resize(static_cast<std::size_t>(length) + 1);
    t.parent[0] = -1;
    for (int i = 1; i <= length; ++i) t.parent[static_cast<std::size_t>(i)] = i - 1;
    return t;
}

TreeSpec TreeSpec::complete_binary(int depth) {
    TreeSpec t;
    int size = (1 << (depth + 1)) - 1;
    t.parent.resize(static_cast<std::size_t>(size));
    t.parent[0] = -1;
    for (int i = 1; i < size; ++i) t.parent[static_cast<std::size_t>(i)] = (i - 1) / 2;
    return t;
}

TreeSpec TreeSpec::star(int leaves) {
    TreeSpec t;
    t.parent.resize(static_cast<std::size_t>(leaves) + 1);
    t.parent[0] = -1;
    for (int i = 1; i <= leaves; ++i) t.parent[static_cast<std::size_t>(i)] = 0;
    return t;
}

DoubleBroomSpec DoubleBroomSpec::make(int ell, int t) {
    if (ell < 1) throw PreconditionError("double broom needs path length >= 1");
    DoubleBroomSpec spec;
    spec.ell = ell;
    spec.t = t;
    spec.tree = TreeSpec::path(ell);
    spec.left_root = 0;
    spec.right_root = ell;
    for (int i = 0; i <= ell; ++i) spec.path_nodes.push_back(i);

    auto attach_brush = [&spec](int root_node, std::vector<int>& leaves, int t_depth) {
        if (t_depth == 0) {
            leaves.push_back(root_node);
            return;
        }
        int brush_size = (1 << (t_depth + 1)) - 1;  // heap nodes 0..brush_size-1, 0 = root_node
        int base = spec.tree.size() - 1;            // spec node for heap node j>=1 is base + j
        for (int j = 1; j < brush_size; ++j) {
            int hp = (j - 1) / 2;
            spec.tree.parent.push_back(hp == 0 ? root_node : base + hp);
        }
        for (int j = (1 << t_depth) - 1; j < brush_size; ++j) leaves.push_back(base + j);
    };
    attach_brush(spec.left_root, spec.left_leaves, t);
    attach_brush(spec.right_root, spec.right_leaves, t);
    return spec;
}

// ----------------------------------------------------------- the embedding

PartialEmbedding PartialEmbedding::init(const Graph& host, const VertexSet& universe,
                                        const VertexSet& targets, Vertex goodness_scale,
                                        int degree_cap) {
    if (!targets.is_subset_of(universe))
        throw PreconditionError("init_embedding: targets must lie inside the host universe");
    if (degree_cap < 1) throw PreconditionError("init_embedding: degree cap must be >= 1");

    PartialEmbedding e;
    e.host_ = &host;
    e.universe_ = universe;
    e.used_ = VertexSet(host.num_vertices());
    e.scale_ = goodness_scale;
    e.cap_ = degree_cap;
    e.phi_inv_.assign(static_cast<std::size_t>(host.num_vertices()), -1);
    e.unused_deg_.assign(static_cast<std::size_t>(host.num_vertices()), 0);
    universe.for_each([&](Vertex v) {
        Vertex c = 0;
        for (Vertex w : host.neighbors(v))
            if (universe.contains(w)) ++c;
        e.unused_deg_[static_cast<std::size_t>(v)] = c;
    });
    targets.for_each([&](Vertex v) {
        int id = static_cast<int>(e.nodes_.size());
        e.nodes_.push_back({v, -1, {}, 0, true});
        e.phi_inv_[static_cast<std::size_t>(v)] = id;
        e.use_host(v);
        ++e.alive_;
    });
    return e;
}

void PartialEmbedding::use_host(Vertex v) {
    used_.insert(v);
    for (Vertex w : host_->neighbors(v))
        if (universe_.contains(w)) --unused_deg_[static_cast<std::size_t>(w)];
}

void PartialEmbedding::release_host(Vertex v) {
    used_.erase(v);
    for (Vertex w : host_->neighbors(v))
        if (universe_.contains(w)) ++unused_deg_[static_cast<std::size_t>(w)];
}

std::vector<Vertex> PartialEmbedding::candidates(int parent_node, ExtendPolicy policy) const {
    const Node& p = nodes_[static_cast<std::size_t>(parent_node)];
    std::vector<Vertex> cands;
    for (Vertex w : host_->neighbors(p.host))
        if (universe_.contains(w) && !used_.contains(w)) cands.push_back(w);
    if (policy == ExtendPolicy::max_unused_degree) {
        std::stable_sort(cands.begin(), cands.end(), [&](Vertex a, Vertex b) {
            Vertex ua = unused_deg_[static_cast<std::size_t>(a)];
            Vertex ub = unused_deg_[static_cast<std::size_t>(b)];
            return ua != ub ? ua > ub : a < b;
        });
    }
    return cands;
}

int PartialEmbedding::extend_leaf(int parent_node, ExtendPolicy policy) {
    const Node& p = nodes_[static_cast<std::size_t>(parent_node)];
    if (!p.alive) throw PreconditionError("extend_leaf: parent node is not in the forest");
    if (p.degree >= cap_)
        throw PreconditionError("extend_leaf: parent at degree cap D=" + std::to_string(cap_));
    Vertex best = -1;
    Vertex best_score = -1;
    for (Vertex w : host_->neighbors(p.host)) {
        if (!universe_.contains(w) || used_.contains(w)) continue;
        if (policy == ExtendPolicy::first_unused) {
            best = w;
            break;
        }
        Vertex score = unused_deg_[static_cast<std::size_t>(w)];
        if (score > best_score) {
            best_score = score;
            best = w;
        }
    }
    if (best < 0) {
        Vertex in_universe = 0, used_nb = 0;
        for (Vertex w : host_->neighbors(p.host))
            if (universe_.contains(w)) {
                ++in_universe;
                if (used_.contains(w)) ++used_nb;
            }
        throw ExtensionFailure(
            "extend_leaf",
            "no unused neighbor of host vertex " + std::to_string(p.host),
            "universe neighbors=" + std::to_string(in_universe) +
                " all used=" + std::to_string(used_nb) +
                " forest=" + std::to_string(alive_));
    }
    return extend_leaf_at(parent_node, best);
}

int PartialEmbedding::extend_leaf_at(int parent_node, Vertex host_v) {
    Node& p = nodes_[static_cast<std::size_t>(parent_node)];
    if (!p.alive) throw PreconditionError("extend_leaf: parent node is not in the forest");
    if (p.degree >= cap_)
        throw PreconditionError("extend_leaf: parent at degree cap D=" + std::to_string(cap_));
    if (!universe_.contains(host_v) || used_.contains(host_v))
        throw PreconditionError("extend_leaf: host vertex unavailable");
    if (!host_->has_edge(p.host, host_v))
        throw PreconditionError("extend_leaf: image edge missing in host");

    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({host_v, parent_node, {}, 1, true});
    nodes_[static_cast<std::size_t>(parent_node)].children.push_back(id);
    ++nodes_[static_cast<std::size_t>(parent_node)].degree;
    phi_inv_[static_cast<std::size_t>(host_v)] = id;
    use_host(host_v);
    ++alive_;
    return id;
}

void PartialEmbedding::rollback_leaf(int node) {
    Node& x = nodes_[static_cast<std::size_t>(node)];
    if (!x.alive) throw PreconditionError("rollback_leaf: node is not in the forest");
    if (x.degree > 1)
        throw PreconditionError("rollback_leaf: degree " + std::to_string(x.degree) +
                                " > 1, only degree-<=1 vertices can be removed");
    if (x.parent >= 0) {
        Node& p = nodes_[static_cast<std::size_t>(x.parent)];
        --p.degree;
        p.children.erase(std::find(p.children.begin(), p.children.end(), node));
    } else if (!x.children.empty()) {
        // degree-1 root: its single child becomes a root
        Node& c = nodes_[static_cast<std::size_t>(x.children.front())];
        c.parent = -1;
        --c.degree;
        x.children.clear();
    }
    x.alive = false;
    phi_inv_[static_cast<std::size_t>(x.host)] = -1;
    release_host(x.host);
    --alive_;
}

std::vector<int> PartialEmbedding::alive_nodes() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].alive) out.push_back(static_cast<int>(i));
    return out;
}

// ------------------------------------------------------------ exact oracle

bool goodness_exact(const PartialEmbedding& e, std::int64_t subset_cap) {
    const Graph& g = e.host();
    std::vector<Vertex> members = e.universe().to_vector();
    const int u = static_cast<int>(members.size());
    if (u > 64) throw PreconditionError("goodness_exact limited to |universe| <= 64");
    const Vertex s = std::min<Vertex>(e.goodness_scale(), static_cast<Vertex>(u));
    if (s <= 0) return true;

    double combos = 0.0, binom = 1.0;
    for (Vertex j = 1; j <= s; ++j) {
        binom = binom * static_cast<double>(u - j + 1) / static_cast<double>(j);
        combos += binom;
        if (combos > static_cast<double>(subset_cap))
            throw PreconditionError("goodness_exact: subset count exceeds cap");
    }

    std::vector<std::uint64_t> adj(members.size(), 0);
    std::vector<int> index_of(static_cast<std::size_t>(g.num_vertices()), -1);
    for (std::size_t i = 0; i < members.size(); ++i)
        index_of[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < members.size(); ++i)
        for (Vertex w : g.neighbors(members[i]))
            if (index_of[static_cast<std::size_t>(w)] >= 0)
                adj[i] |= std::uint64_t{1} << index_of[static_cast<std::size_t>(w)];

    std::uint64_t used_mask = 0;
    std::vector<int> slack(members.size(), 0);  // D - deg_F(phi^-1(v)), 0 for unused
    for (std::size_t i = 0; i < members.size(); ++i) {
        int node = e.node_of(members[i]);
        if (node >= 0 && e.node_alive(node)) {
            used_mask |= std::uint64_t{1} << i;
            slack[i] = e.degree_cap() - e.node_degree(node);
        } else {
            slack[i] = e.degree_cap();
        }
    }

    struct Frame {
        int next;
        std::uint64_t gamma;
        std::uint64_t xmask;
        int rhs;  // sum of slacks + |used ∩ X|
        int size;
    };
    std::vector<Frame> frames;
    frames.push_back({0, 0, 0, 0, 0});
    while (!frames.empty()) {
        Frame f = frames.back();
        frames.pop_back();
        for (int i = f.next; i < u; ++i) {
            std::uint64_t bit = std::uint64_t{1} << i;
            Frame child;
            child.next = i + 1;
            child.xmask = f.xmask | bit;
            child.gamma = f.gamma | adj[static_cast<std::size_t>(i)];
            child.size = f.size + 1;
            child.rhs = f.rhs + slack[static_cast<std::size_t>(i)] +
                        ((used_mask & bit) ? 1 : 0);
            int lhs = std::popcount(child.gamma & ~used_mask);
            if (lhs < child.rhs) return false;
            if (child.size < s) frames.push_back(child);
        }
    }
    return true;
}

// -------------------------------------------------------------- embed_tree

std::vector<int> embed_tree(PartialEmbedding& e, const TreeSpec& tree, int attach_node,
                            int backtrack_budget, EmbedStats* stats, ExtendPolicy policy) {
    if (tree.size() < 1 || tree.parent[0] != -1)
        throw PreconditionError("embed_tree: tree spec must have parent[0] == -1");
    if (!e.node_alive(attach_node))
        throw PreconditionError("embed_tree: attach node is not in the forest");

    const int k = tree.size();
    std::vector<int> ids(static_cast<std::size_t>(k), -1);
    ids[0] = attach_node;

    // hosts already tried per position; empty on the allocation-free fast path
    std::vector<std::vector<Vertex>> tried(static_cast<std::size_t>(k));
    int budget = backtrack_budget;
    int pos = 1;
    int deepest = 0;

    auto unwind = [&](const std::string& what) {
        for (int q = pos - 1; q >= 1; --q)
            if (ids[static_cast<std::size_t>(q)] >= 0)
                e.rollback_leaf(ids[static_cast<std::size_t>(q)]);
        throw ExtensionFailure("embed_tree", what,
                               "placed prefix reached " + std::to_string(deepest) + " of " +
                                   std::to_string(k - 1) + " new vertices");
    };

    while (pos < k) {
        int parent_id = ids[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(pos)])];
        auto& skip = tried[static_cast<std::size_t>(pos)];
        Vertex chosen = -1;
        if (skip.empty()) {
            try {
                int id = e.extend_leaf(parent_id, policy);
                chosen = e.host_of(id);
                ids[static_cast<std::size_t>(pos)] = id;
            } catch (const ExtensionFailure&) {
                chosen = -1;
            }
        } else {
            for (Vertex v : e.candidates(parent_id, policy)) {
                if (std::find(skip.begin(), skip.end(), v) != skip.end()) continue;
                ids[static_cast<std::size_t>(pos)] = e.extend_leaf_at(parent_id, v);
                chosen = v;
                break;
            }
        }
        if (chosen >= 0) {
            skip.push_back(chosen);
            if (stats) {
                ++stats->extensions;
                stats->peak_forest = std::max(stats->peak_forest, e.forest_size());
            }
            deepest = std::max(deepest, pos);
            ++pos;
            continue;
        }
        // exhausted candidates here: back up one position and retry it
        skip.clear();
        if (pos == 1) unwind("no admissible image for the tree");
        if (--budget < 0) unwind("backtracking budget exhausted");
        --pos;
        e.rollback_leaf(ids[static_cast<std::size_t>(pos)]);
        ids[static_cast<std::size_t>(pos)] = -1;
        if (stats) ++stats->backtracks;
    }
    return ids;
}

}  // namespace crown
