#include "crown/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "crown/matching.hpp"
#include "crown/rng.hpp"

namespace crown {

namespace {

Vertex pipeline_scale(Vertex n, double delta) {
    return static_cast<Vertex>(std::floor((1.0 - delta) * static_cast<double>(n) / 6.0));
}

int min_depth_for_leaves(double target) {
    int t = 0;
    while (std::ldexp(1.0, t) < target) ++t;
    return t;
}

std::string join_sample(const std::vector<Vertex>& vs, std::size_t cap = 12) {
    std::string s;
    for (std::size_t i = 0; i < vs.size() && i < cap; ++i) {
        if (i) s += ",";
        s += std::to_string(vs[i]);
    }
    if (vs.size() > cap) s += ",...";
    return s;
}

}  // namespace

Vertex Brush::parent_of(Vertex v) const {
    for (const auto& [child, par] : parent)
        if (child == v) return par;
    throw PreconditionError("brush: vertex " + std::to_string(v) + " has no recorded parent");
}

// ------------------------------------------------------------------ stage 2

SerpentResult build_serpent(const Graph& g, const VertexSet& V1, const VertexSet& S2,
                            double delta, const Budgets& budgets) {
    if (S2.empty()) throw PreconditionError("build_serpent: S2 must be nonempty");
    if (!S2.is_subset_of(V1)) throw PreconditionError("build_serpent: S2 must lie inside V1");

    const Vertex n = g.num_vertices();
    const double dn = delta * static_cast<double>(n);
    const double consumption_cap = budgets.consumption_cap_factor * dn;
    const double size_hint = (1.0 - delta) * static_cast<double>(n) / 12.0;

    SerpentResult out;
    out.stats.name = "serpent";
    out.embedding = PartialEmbedding::init(g, V1, S2, pipeline_scale(n, delta), 3);
    PartialEmbedding& emb = out.embedding;

    std::vector<std::vector<Vertex>> paths;
    S2.for_each([&](Vertex v) { paths.push_back({v}); });
    const auto s2 = static_cast<Vertex>(paths.size());

    std::vector<Edge> merge_edges;
    Vertex peak = emb.forest_size();
    std::int64_t size_hint_breaches = 0;
    EmbedStats estats;

    auto assert_consumption = [&](Vertex forest_now) {
        peak = std::max(peak, forest_now);
        if (static_cast<double>(forest_now) > consumption_cap)
            throw StageFailure("serpent",
                               "consumption cap breached: forest holds " +
                                   std::to_string(forest_now) + " vertices > " +
                                   std::to_string(consumption_cap) + " (= " +
                                   std::to_string(budgets.consumption_cap_factor) + "*delta*n)");
    };

    for (Vertex i = s2; i >= 2; --i) {
        // one endpoint per path, lowest vertex id
        struct Pick {
            Vertex endpoint;
            int path_idx;
        };
        std::vector<Pick> xs;
        xs.reserve(static_cast<std::size_t>(i));
        for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
            Vertex a = paths[static_cast<std::size_t>(p)].front();
            Vertex b = paths[static_cast<std::size_t>(p)].back();
            xs.push_back({std::min(a, b), p});
        }
        std::sort(xs.begin(), xs.end(),
                  [](const Pick& a, const Pick& b) { return a.endpoint < b.endpoint; });
        const Vertex half1 = (i + 1) / 2;  // |X_i1| = ceil(i/2)

        int t_i = 0;
        while (static_cast<double>(i / 2) * std::ldexp(1.0, t_i) < dn) ++t_i;

        // grow a depth-t_i complete binary tree from every chosen endpoint
        std::vector<int> grown;  // forest node ids, creation order
        TreeSpec tree = TreeSpec::complete_binary(t_i);
        const int leaf_lo = (1 << t_i) - 1;  // heap leaf indices
        const int leaf_hi = (1 << (t_i + 1)) - 2;
        std::vector<std::vector<Vertex>> leaf_hosts(xs.size());
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            if (t_i == 0) {
                leaf_hosts[xi] = {xs[xi].endpoint};
                continue;
            }
            std::vector<int> ids;
            try {
                ids = embed_tree(emb, tree, emb.node_of(xs[xi].endpoint), budgets.backtrack,
                                 &estats);
            } catch (const ExtensionFailure& ex) {
                throw StageFailure("serpent",
                                   "tree growth failed at merge step i=" + std::to_string(i) +
                                       " from endpoint " + std::to_string(xs[xi].endpoint),
                                   ex.diagnostics);
            }
            for (std::size_t q = 1; q < ids.size(); ++q) grown.push_back(ids[q]);
            for (int l = leaf_lo; l <= leaf_hi; ++l)
                leaf_hosts[xi].push_back(emb.host_of(ids[static_cast<std::size_t>(l)]));
            assert_consumption(emb.forest_size());
        }
        if (static_cast<double>(emb.forest_size()) > size_hint) ++size_hint_breaches;

        // leaf image sets for the two halves
        std::vector<Vertex> left_leaves, right_leaves;
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            auto& dst = xi < static_cast<std::size_t>(half1) ? left_leaves : right_leaves;
            dst.insert(dst.end(), leaf_hosts[xi].begin(), leaf_hosts[xi].end());
        }
        std::sort(left_leaves.begin(), left_leaves.end());
        std::sort(right_leaves.begin(), right_leaves.end());

        // host edge between the two leaf sets: scan the smaller one
        const bool left_small = left_leaves.size() <= right_leaves.size();
        const auto& scan = left_small ? left_leaves : right_leaves;
        const auto& other = left_small ? right_leaves : left_leaves;
        VertexSet other_set = VertexSet::of(n, other);
        Vertex eu = -1, ev = -1;
        for (Vertex u : scan) {
            for (Vertex w : g.neighbors(u)) {
                if (other_set.contains(w)) {
                    eu = u;
                    ev = w;
                    break;
                }
            }
            if (eu >= 0) break;
        }
        if (eu < 0)
            throw StageFailure("serpent",
                               "no host edge between leaf sets at merge step i=" +
                                   std::to_string(i),
                               "left leaves [" + join_sample(left_leaves) + "] (" +
                                   std::to_string(left_leaves.size()) + "), right leaves [" +
                                   join_sample(right_leaves) + "] (" +
                                   std::to_string(right_leaves.size()) + ")");
        Vertex u_left = left_small ? eu : ev;  // endpoint on the X_i1 side
        Vertex w_right = left_small ? ev : eu;

        // walk both leaves to their roots; keep those branches, roll back the rest
        auto branch_of = [&](Vertex leaf_host) {
            std::vector<Vertex> hosts;  // leaf..root
            std::vector<int> branch_nodes;
            int node = emb.node_of(leaf_host);
            for (int step = 0; step < t_i; ++step) {
                hosts.push_back(emb.host_of(node));
                branch_nodes.push_back(node);
                node = emb.node_parent(node);
            }
            hosts.push_back(emb.host_of(node));  // the root endpoint, not a grown node
            return std::make_pair(hosts, branch_nodes);
        };
        auto [chain_u, keep_u] = branch_of(u_left);
        auto [chain_w, keep_w] = branch_of(w_right);
        std::unordered_set<int> keep(keep_u.begin(), keep_u.end());
        keep.insert(keep_w.begin(), keep_w.end());
        for (auto it = grown.rbegin(); it != grown.rend(); ++it)
            if (!keep.count(*it)) emb.rollback_leaf(*it);

        // merge the two paths through the kept branches
        Vertex x1 = chain_u.back();
        Vertex x2 = chain_w.back();
        int idx1 = -1, idx2 = -1;
        for (const Pick& p : xs) {
            if (p.endpoint == x1) idx1 = p.path_idx;
            if (p.endpoint == x2) idx2 = p.path_idx;
        }
        if (idx1 < 0 || idx2 < 0 || idx1 == idx2)
            throw StageFailure("serpent", "internal: merge endpoints did not map to two paths");
        std::vector<Vertex>& pa = paths[static_cast<std::size_t>(idx1)];
        std::vector<Vertex>& pb = paths[static_cast<std::size_t>(idx2)];
        if (pa.front() == x1) std::reverse(pa.begin(), pa.end());
        if (pb.back() == x2) std::reverse(pb.begin(), pb.end());

        std::vector<Vertex> merged;
        merged.reserve(pa.size() + pb.size() + 2 * static_cast<std::size_t>(t_i));
        merged.insert(merged.end(), pa.begin(), pa.end());
        // x1 -> u_left (chain_u reversed, skipping x1)
        for (auto it = chain_u.rbegin() + 1; it != chain_u.rend(); ++it) merged.push_back(*it);
        // w_right -> x2 (chain_w forward, skipping x2)
        for (std::size_t q = 0; q + 1 < chain_w.size(); ++q) merged.push_back(chain_w[q]);
        merged.insert(merged.end(), pb.begin(), pb.end());

        merge_edges.push_back({u_left, w_right});
        int lo = std::min(idx1, idx2), hi = std::max(idx1, idx2);
        paths[static_cast<std::size_t>(lo)] = std::move(merged);
        paths.erase(paths.begin() + hi);

        // loop invariants
        if (static_cast<Vertex>(paths.size()) != i - 1)
            throw StageFailure("serpent", "internal: path count invariant broken");
        if (static_cast<Vertex>(merge_edges.size()) != s2 - (i - 1))
            throw StageFailure("serpent", "internal: |E_i| invariant broken");
        std::int64_t covered = 0;
        for (const auto& p : paths) covered += static_cast<std::int64_t>(p.size());
        if (covered != static_cast<std::int64_t>(emb.forest_size()))
            throw StageFailure("serpent", "internal: forest/path bookkeeping diverged");
        assert_consumption(emb.forest_size());
    }

    out.serpent.path = paths.front();
    out.serpent.a1 = out.serpent.path.front();
    out.serpent.b1 = out.serpent.path.back();
    out.serpent.deleted_edges = std::move(merge_edges);
    out.serpent.length = static_cast<std::int64_t>(out.serpent.path.size()) - 1;

    // re-verify the stage output against the host
    {
        const auto& p = out.serpent.path;
        std::unordered_set<Vertex> seen;
        for (Vertex v : p)
            if (!seen.insert(v).second)
                throw StageFailure("serpent", "postcondition: path revisits vertex " +
                                                  std::to_string(v));
        for (std::size_t q = 0; q + 1 < p.size(); ++q)
            if (!g.has_edge(p[q], p[q + 1]))
                throw StageFailure("serpent", "postcondition: missing host edge on path");
        bool covered_all = true;
        S2.for_each([&](Vertex v) { covered_all = covered_all && seen.count(v) > 0; });
        if (!covered_all) throw StageFailure("serpent", "postcondition: S2 not covered by path");
        if (!S2.contains(out.serpent.a1) || !S2.contains(out.serpent.b1))
            throw StageFailure("serpent", "postcondition: endpoints not in S2");
        if (static_cast<Vertex>(out.serpent.deleted_edges.size()) != s2 - 1)
            throw StageFailure("serpent", "postcondition: |E_1| != |S_2| - 1");
    }

    out.stats.num("s2", static_cast<double>(s2));
    out.stats.num("ell1", static_cast<double>(out.serpent.length));
    out.stats.num("peak_consumption", static_cast<double>(peak));
    out.stats.num("consumption_cap", consumption_cap);
    out.stats.num("extensions", static_cast<double>(estats.extensions));
    out.stats.num("backtracks", static_cast<double>(estats.backtracks));
    out.stats.num("size_hint_breaches", static_cast<double>(size_hint_breaches));
    return out;
}

// ------------------------------------------------------------------ stage 3

DoubleBroom grow_double_broom(const Graph& g, SerpentResult& sr, int t, const Budgets& budgets,
                              double delta, StageStat* stat) {
    const Vertex n = g.num_vertices();
    const double dn = delta * static_cast<double>(n);
    const Serpent& s = sr.serpent;
    PartialEmbedding& emb = sr.embedding;

    DoubleBroom broom;
    broom.path = s.path;
    broom.t = t;

    const std::int64_t brush_nodes = t == 0 ? 0 : (std::int64_t{2} << t) - 2;
    const std::int64_t total = (s.length + 1) + 2 * brush_nodes;
    const double cap = budgets.broom_cap_factor * dn;
    if (static_cast<double>(total) > cap)
        throw StageFailure("double-broom",
                           "broom bound breached: |V(T1)| = " + std::to_string(total) + " > " +
                               std::to_string(cap) + " (= " +
                               std::to_string(budgets.broom_cap_factor) + "*delta*n)");
    if (t > 0 && s.a1 == s.b1)
        throw StageFailure("double-broom", "degenerate serpent: both endpoints coincide");

    EmbedStats estats;
    auto grow = [&](Vertex root) {
        Brush b;
        b.root = root;
        b.vertices.push_back(root);
        if (t == 0) {
            b.leaves.push_back(root);
            return b;
        }
        TreeSpec tree = TreeSpec::complete_binary(t);
        std::vector<int> ids;
        try {
            ids = embed_tree(emb, tree, emb.node_of(root), budgets.backtrack, &estats);
        } catch (const ExtensionFailure& ex) {
            throw StageFailure("double-broom",
                               "brush growth failed at root " + std::to_string(root),
                               ex.diagnostics);
        }
        for (std::size_t j = 1; j < ids.size(); ++j) {
            Vertex v = emb.host_of(ids[j]);
            b.vertices.push_back(v);
            b.parent.emplace_back(v, emb.host_of(emb.node_parent(ids[j])));
        }
        for (int l = (1 << t) - 1; l <= (1 << (t + 1)) - 2; ++l)
            b.leaves.push_back(emb.host_of(ids[static_cast<std::size_t>(l)]));
        return b;
    };
    broom.left = grow(s.a1);
    broom.right = grow(s.b1);

    if (broom.total_vertices() != total)
        throw StageFailure("double-broom", "internal: size bookkeeping diverged");
    if (stat) {
        stat->name = "double-broom";
        stat->num("t", t);
        stat->num("size", static_cast<double>(total));
        stat->num("cap", cap);
        stat->num("leaves_per_brush", std::ldexp(1.0, t));
        stat->num("extensions", static_cast<double>(estats.extensions));
        stat->num("backtracks", static_cast<double>(estats.backtracks));
    }
    return broom;
}

// ------------------------------------------------------------------ stage 4

DoubleBroom embed_second_broom(const Graph& g, const VertexSet& U, std::int64_t ell2, int t,
                               double delta, const Budgets& budgets, std::uint64_t seed,
                               StageStat* stat) {
    const Vertex n = g.num_vertices();
    const double dn = delta * static_cast<double>(n);
    if (ell2 < 1)
        throw StageFailure("second-broom",
                           "infeasible arithmetic: ell2 = " + std::to_string(ell2) + " < 1");

    CleanReport clean = clean_to_expander(g, U, delta);
    const VertexSet& u0 = clean.u0;

    const std::int64_t brush_nodes = t == 0 ? 0 : (std::int64_t{2} << t) - 2;
    const std::int64_t total = ell2 + 1 + 2 * brush_nodes;
    if (total > static_cast<std::int64_t>(u0.count()))
        throw StageFailure("second-broom",
                           "infeasible: |V(T2)| = " + std::to_string(ell2) + "+1+2*(2^" +
                               std::to_string(t + 1) + "-2) = " + std::to_string(total) +
                               " exceeds |U0| = " + std::to_string(u0.count()));

    // Haxell-type hypothesis audit (sampled, diagnostic): small sets expand
    // 3x plus one; mid sets expand 3x plus the tree size.
    bool tier1_ok = true, tier2_ok = true;
    {
        ExpansionCheck c1 = expanding_check(g, u0, static_cast<Vertex>(std::max(1.0, dn)), 3.0,
                                            CheckMode::sampled, 32, seed ^ 0xB1);
        tier1_ok = c1.ok;
        // tier 2: sizes in (dn, 2dn]; reuse the sampled checker on 2dn and
        // accept that sizes below dn are re-audited at the weaker bound
        ExpansionCheck c2 = expanding_check(
            g, u0, static_cast<Vertex>(std::max(2.0, 2.0 * dn)), 3.0, CheckMode::sampled, 32,
            seed ^ 0xB2);
        tier2_ok = c2.ok;
    }

    // root: best-connected vertex of U0
    Vertex root = -1;
    std::int64_t best = -1;
    u0.for_each([&](Vertex v) {
        std::int64_t c = 0;
        for (Vertex w : g.neighbors(v))
            if (u0.contains(w)) ++c;
        if (c > best) {
            best = c;
            root = v;
        }
    });
    if (root < 0) throw StageFailure("second-broom", "empty U0");

    VertexSet targets(n);
    targets.insert(root);
    PartialEmbedding emb = PartialEmbedding::init(g, u0, targets, pipeline_scale(n, delta), 3);

    DoubleBroomSpec spec = DoubleBroomSpec::make(static_cast<int>(ell2), t);
    std::vector<int> ids;
    EmbedStats estats;
    try {
        ids = embed_tree(emb, spec.tree, emb.node_of(root), budgets.backtrack, &estats);
    } catch (const ExtensionFailure& ex) {
        throw StageFailure("second-broom", "embedding T2 failed", ex.diagnostics);
    }

    DoubleBroom broom;
    broom.t = t;
    for (int p : spec.path_nodes) broom.path.push_back(emb.host_of(ids[static_cast<std::size_t>(p)]));
    auto build_brush = [&](int root_spec, const std::vector<int>& leaf_specs) {
        Brush b;
        b.root = emb.host_of(ids[static_cast<std::size_t>(root_spec)]);
        b.vertices.push_back(b.root);
        if (t == 0) {
            b.leaves.push_back(b.root);
            return b;
        }
        // brush spec nodes are those above the path range with this root as ancestor;
        // reconstruct membership by walking parents in the spec
        for (int j = static_cast<int>(spec.path_nodes.size()); j < spec.tree.size(); ++j) {
            int a = j;
            while (spec.tree.parent[static_cast<std::size_t>(a)] >=
                   static_cast<int>(spec.path_nodes.size()))
                a = spec.tree.parent[static_cast<std::size_t>(a)];
            int anchor = spec.tree.parent[static_cast<std::size_t>(a)];
            if (anchor != root_spec) continue;
            Vertex v = emb.host_of(ids[static_cast<std::size_t>(j)]);
            Vertex p = emb.host_of(ids[static_cast<std::size_t>(
                spec.tree.parent[static_cast<std::size_t>(j)])]);
            b.vertices.push_back(v);
            b.parent.emplace_back(v, p);
        }
        for (int l : leaf_specs) b.leaves.push_back(emb.host_of(ids[static_cast<std::size_t>(l)]));
        return b;
    };
    broom.left = build_brush(spec.left_root, spec.left_leaves);
    broom.right = build_brush(spec.right_root, spec.right_leaves);

    if (stat) {
        stat->name = "second-broom";
        stat->num("ell2", static_cast<double>(ell2));
        stat->num("t", t);
        stat->num("size", static_cast<double>(total));
        stat->num("u_size", static_cast<double>(U.count()));
        stat->num("u0_size", static_cast<double>(u0.count()));
        stat->num("peeled", static_cast<double>(clean.removed.count()));
        stat->num("peel_rounds", clean.rounds);
        stat->num("extensions", static_cast<double>(estats.extensions));
        stat->num("backtracks", static_cast<double>(estats.backtracks));
        stat->note("haxell_tier1_sampled", tier1_ok ? "pass" : "FAIL");
        stat->note("haxell_tier2_sampled", tier2_ok ? "pass" : "FAIL");
        stat->note("u_at_least_half_n",
                   static_cast<double>(U.count()) >= static_cast<double>(n) / 2.0 ? "yes"
                                                                                   : "no");
    }
    return broom;
}

// ------------------------------------------------------------------ stage 5

std::vector<Vertex> close_cycle(const Graph& g, const DoubleBroom& t1, const DoubleBroom& t2,
                                double delta, StageStat* stat) {
    const Vertex n = g.num_vertices();
    const double dn = delta * static_cast<double>(n);

    for (const auto* leaves :
         {&t1.left.leaves, &t1.right.leaves, &t2.left.leaves, &t2.right.leaves})
        if (static_cast<double>(leaves->size()) < dn)
            throw StageFailure("cycle-closure", "a brush has fewer than delta*n leaves (" +
                                                    std::to_string(leaves->size()) + ")");

    // vertex-disjointness of the two brooms
    VertexSet v1(n), v2(n);
    auto add_broom = [](VertexSet& s, const DoubleBroom& b) {
        for (Vertex v : b.path) s.insert(v);
        for (Vertex v : b.left.vertices) s.insert(v);
        for (Vertex v : b.right.vertices) s.insert(v);
    };
    add_broom(v1, t1);
    add_broom(v2, t2);
    if (v1.intersects(v2))
        throw StageFailure("cycle-closure", "brooms are not vertex-disjoint");

    auto find_edge = [&g, n](const std::vector<Vertex>& a, const std::vector<Vertex>& b,
                             const char* which) {
        const auto& scan = a.size() <= b.size() ? a : b;
        const auto& other = a.size() <= b.size() ? b : a;
        VertexSet other_set = VertexSet::of(n, other);
        std::vector<Vertex> sorted_scan = scan;
        std::sort(sorted_scan.begin(), sorted_scan.end());
        for (Vertex u : sorted_scan)
            for (Vertex w : g.neighbors(u))
                if (other_set.contains(w))
                    return a.size() <= b.size() ? Edge{u, w} : Edge{w, u};
        throw StageFailure("cycle-closure",
                           std::string("no host edge between leaf brushes (") + which + ")",
                           "sizes " + std::to_string(a.size()) + " x " + std::to_string(b.size()));
    };
    Edge f1 = find_edge(t1.left.leaves, t2.left.leaves, "L11 x L21");
    Edge f2 = find_edge(t1.right.leaves, t2.right.leaves, "L12 x L22");

    auto climb = [](const Brush& b, Vertex leaf) {
        std::vector<Vertex> chain{leaf};  // leaf .. root
        Vertex v = leaf;
        while (v != b.root) {
            v = b.parent_of(v);
            chain.push_back(v);
        }
        return chain;
    };

    std::vector<Vertex> cycle;
    // u1 .. a1 (climb t1.left), a1 .. b1 (t1 path), b1 .. u2 (descend t1.right)
    {
        auto chain = climb(t1.left, f1.u);
        cycle.insert(cycle.end(), chain.begin(), chain.end());  // u1..a1
    }
    {
        const auto& p = t1.path;
        bool forward = p.front() == cycle.back();
        if (!forward && p.back() != cycle.back())
            throw StageFailure("cycle-closure", "internal: T1 path does not meet left brush root");
        if (forward)
            cycle.insert(cycle.end(), p.begin() + 1, p.end());
        else
            cycle.insert(cycle.end(), p.rbegin() + 1, p.rend());
    }
    {
        auto chain = climb(t1.right, f2.u);  // u2..b1
        if (chain.back() != cycle.back())
            throw StageFailure("cycle-closure", "internal: T1 right brush root mismatch");
        cycle.insert(cycle.end(), chain.rbegin() + 1, chain.rend());  // b1..u2 skipping b1
    }
    // f2 jumps to w2; w2 .. b2 (climb t2.right), b2 .. a2 (t2 path), a2 .. w1 (descend t2.left)
    {
        auto chain = climb(t2.right, f2.v);
        cycle.insert(cycle.end(), chain.begin(), chain.end());  // w2..b2
    }
    {
        const auto& p = t2.path;
        bool from_back = p.back() == cycle.back();
        if (!from_back && p.front() != cycle.back())
            throw StageFailure("cycle-closure", "internal: T2 path does not meet right brush root");
        if (from_back)
            cycle.insert(cycle.end(), p.rbegin() + 1, p.rend());
        else
            cycle.insert(cycle.end(), p.begin() + 1, p.end());
    }
    {
        auto chain = climb(t2.left, f1.v);  // w1..a2
        if (chain.back() != cycle.back())
            throw StageFailure("cycle-closure", "internal: T2 left brush root mismatch");
        cycle.insert(cycle.end(), chain.rbegin() + 1, chain.rend());  // a2..w1 skipping a2
    }

    // structural re-verification
    std::int64_t expected =
        (static_cast<std::int64_t>(t1.path.size()) - 1) +
        (static_cast<std::int64_t>(t2.path.size()) - 1) + 4 * t1.t + 2;
    if (static_cast<std::int64_t>(cycle.size()) != expected)
        throw StageFailure("cycle-closure",
                           "cycle length " + std::to_string(cycle.size()) + " != ell1+ell2+4t+2 = " +
                               std::to_string(expected));
    std::unordered_set<Vertex> seen;
    for (Vertex v : cycle)
        if (!seen.insert(v).second)
            throw StageFailure("cycle-closure", "cycle revisits vertex " + std::to_string(v));
    for (std::size_t i = 0; i < cycle.size(); ++i)
        if (!g.has_edge(cycle[i], cycle[(i + 1) % cycle.size()]))
            throw StageFailure("cycle-closure", "missing host edge on the closed cycle");

    if (stat) {
        stat->name = "cycle-closure";
        stat->num("length", static_cast<double>(cycle.size()));
        stat->note("f1", std::to_string(f1.u) + "-" + std::to_string(f1.v));
        stat->note("f2", std::to_string(f2.u) + "-" + std::to_string(f2.v));
    }
    return cycle;
}

// ------------------------------------------------------------------ stage 6

std::vector<Edge> spike_matching(const Graph& g, const std::vector<Vertex>& cycle,
                                 StageStat* stat) {
    const Vertex n = g.num_vertices();
    VertexSet on_cycle = VertexSet::of(n, cycle);
    if (static_cast<Vertex>(cycle.size()) != on_cycle.count())
        throw PreconditionError("spike_matching: cycle repeats a vertex");
    VertexSet outside_set = on_cycle.complement();
    std::vector<Vertex> outside = outside_set.to_vector();
    if (outside.size() > cycle.size())
        throw PreconditionError("spike_matching: more outside vertices than cycle vertices");

    // left = outside, right = cycle vertices (ascending)
    std::vector<Vertex> cyc_sorted = on_cycle.to_vector();
    std::vector<int> right_index(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < cyc_sorted.size(); ++i)
        right_index[static_cast<std::size_t>(cyc_sorted[i])] = static_cast<int>(i);

    std::vector<std::vector<int>> adj(outside.size());
    for (std::size_t i = 0; i < outside.size(); ++i)
        for (Vertex w : g.neighbors(outside[i]))
            if (on_cycle.contains(w))
                adj[i].push_back(right_index[static_cast<std::size_t>(w)]);

    MatchingResult m = hopcroft_karp(static_cast<int>(outside.size()),
                                     static_cast<int>(cyc_sorted.size()), adj);
    if (m.size < static_cast<std::int64_t>(outside.size())) {
        std::vector<Vertex> violator, nbhd;
        for (int i : m.hall_violator) violator.push_back(outside[static_cast<std::size_t>(i)]);
        for (int i : m.hall_neighborhood) nbhd.push_back(cyc_sorted[static_cast<std::size_t>(i)]);
        throw StageFailure("spike-matching",
                           "matching deficit: " + std::to_string(m.size) + " < " +
                               std::to_string(outside.size()),
                           "Hall violator X (|X|=" + std::to_string(violator.size()) +
                               ", sample " + join_sample(violator) + ") has |N(X)|=" +
                               std::to_string(nbhd.size()));
    }

    std::vector<Edge> spikes;
    spikes.reserve(outside.size());
    for (std::size_t i = 0; i < outside.size(); ++i)
        spikes.push_back({cyc_sorted[static_cast<std::size_t>(m.match_left[i])], outside[i]});
    std::sort(spikes.begin(), spikes.end(),
              [](const Edge& a, const Edge& b) { return a.u < b.u; });
    if (stat) {
        stat->name = "spike-matching";
        stat->num("spikes", static_cast<double>(spikes.size()));
        stat->num("outside", static_cast<double>(outside.size()));
    }
    return spikes;
}

// ------------------------------------------------------------------ driver

PipelineResult run_pipeline(const Graph& g, const RunConfig& config) {
    const Vertex n = g.num_vertices();
    if (n < 8) throw PreconditionError("run_pipeline: graph too small");
    if (!g.is_regular())
        throw PreconditionError("run_pipeline: graph must be regular (degrees " +
                                std::to_string(g.degree_min()) + ".." +
                                std::to_string(g.degree_max()) + ")");
    const double delta = config.delta;
    const double delta1 = config.effective_delta1();
    if (!(delta > 0 && delta < delta1 && delta1 < 1))
        throw PreconditionError("run_pipeline: need 0 < delta < delta1 < 1 (delta=" +
                                std::to_string(delta) + ", delta1=" + std::to_string(delta1) +
                                ")");

    PipelineResult result;
    Rng root_rng(config.seed);

    // spectral gate
    {
        SpectralOptions sopts;
        sopts.tol = config.lambda_tol;
        sopts.dense_cap = config.dense_cap;
        sopts.seed = Rng::mix(config.seed ^ 0x99);
        result.spectral = estimate_lambda(g, sopts);
        StageStat stat;
        stat.name = "spectral-gate";
        stat.num("lambda_est", result.spectral.lambda_est);
        stat.num("lambda_over_d",
                 result.spectral.lambda_est / static_cast<double>(result.spectral.d));
        stat.num("delta", delta);
        stat.note("method", to_string(result.spectral.method));
        result.stages.push_back(std::move(stat));
        if (result.spectral.lambda_est > delta * static_cast<double>(result.spectral.d) &&
            !config.force)
            throw PreconditionError(
                "spectral gate: lambda/d = " +
                std::to_string(result.spectral.lambda_est / result.spectral.d) + " > delta = " +
                std::to_string(delta) + " (pass --force to run anyway)");
    }

    // stage 1: matchmakers
    {
        result.matchmakers = split_matchmakers(g, delta1, root_rng.split(1).seed(),
                                               config.budgets.resample_factor * n);
        const MatchmakerTriple& t = result.matchmakers;
        if (t.s1.intersects(t.s2) || t.s1.intersects(t.s3) || t.s2.intersects(t.s3))
            throw StageFailure("matchmaker", "postcondition: classes not disjoint");
        double size_bound = static_cast<double>(n) / static_cast<double>(t.color_count - 2);
        for (const VertexSet* s : {&t.s1, &t.s2, &t.s3}) {
            if (static_cast<double>(s->count()) > size_bound)
                throw StageFailure("matchmaker", "postcondition: |Si| > n/(K-2)");
            if (static_cast<double>(s->count()) > delta1 * static_cast<double>(n))
                throw StageFailure("matchmaker", "postcondition: |Si| > delta1*n");
        }
        StageStat stat;
        stat.name = "matchmaker";
        stat.num("K", t.color_count);
        stat.num("threshold", t.threshold);
        stat.num("guaranteed_deg", t.guaranteed_deg);
        stat.num("resamples", static_cast<double>(t.resamples_used));
        stat.num("s1", t.s1.count());
        stat.num("s2", t.s2.count());
        stat.num("s3", t.s3.count());
        result.stages.push_back(std::move(stat));
    }

    // stage 2: serpent
    const VertexSet V1 = result.matchmakers.s1.complement();
    {
        Vertex s_pipe = pipeline_scale(n, delta);
        ExpansionCheck audit = expanding_check(g, V1, s_pipe, 5.0, CheckMode::sampled,
                                               config.audit_samples, root_rng.split(2).seed());
        StageStat stat;
        stat.name = "expansion-audit";
        stat.num("scale", s_pipe);
        stat.num("samples", static_cast<double>(audit.checked));
        stat.note("g_v1_expander_sampled", audit.ok ? "pass" : "FAIL");
        result.stages.push_back(std::move(stat));
        if (!audit.ok)
            throw StageFailure("serpent",
                               "sampled ((1-delta)n/6, 5)-expansion audit failed on G[V1]",
                               "witness X sample [" + join_sample(audit.witness) + "]");
    }
    SerpentResult sr = build_serpent(g, V1, result.matchmakers.s2, delta, config.budgets);
    result.stages.push_back(sr.stats);

    // stage 3: first double broom
    const int t_depth = min_depth_for_leaves(delta * static_cast<double>(n));
    DoubleBroom t1;
    {
        StageStat stat;
        t1 = grow_double_broom(g, sr, t_depth, config.budgets, delta, &stat);
        result.stages.push_back(std::move(stat));
    }

    // stage 4: second double broom in the cleaned leftover
    const Vertex cycle_target = (n + 1) / 2;
    std::int64_t ell2 = static_cast<std::int64_t>(cycle_target) - sr.serpent.length -
                        4 * static_cast<std::int64_t>(t_depth) - 2;
    DoubleBroom t2;
    {
        VertexSet U = V1.minus(sr.embedding.used());
        StageStat stat;
        t2 = embed_second_broom(g, U, ell2, t_depth, delta, config.budgets,
                                root_rng.split(4).seed(), &stat);
        result.stages.push_back(std::move(stat));
    }

    // stage 5: close the cycle
    std::vector<Vertex> cycle;
    {
        StageStat stat;
        cycle = close_cycle(g, t1, t2, delta, &stat);
        result.stages.push_back(std::move(stat));
        if (static_cast<Vertex>(cycle.size()) != cycle_target)
            throw StageFailure("cycle-closure", "cycle length " + std::to_string(cycle.size()) +
                                                    " != ceil(n/2) = " +
                                                    std::to_string(cycle_target));
        VertexSet cyc_set = VertexSet::of(n, cycle);
        bool s2_in = true;
        result.matchmakers.s2.for_each([&](Vertex v) { s2_in = s2_in && cyc_set.contains(v); });
        if (!s2_in) throw StageFailure("cycle-closure", "S2 not contained in the cycle");
        if (cyc_set.intersects(result.matchmakers.s1))
            throw StageFailure("cycle-closure", "S1 leaked into the cycle");
    }

    // stage 6: spikes
    {
        StageStat stat;
        result.crown.cycle = cycle;
        result.crown.spikes = spike_matching(g, cycle, &stat);
        result.stages.push_back(std::move(stat));
        if (static_cast<std::int64_t>(result.crown.spikes.size()) !=
            static_cast<std::int64_t>(n) / 2)
            throw StageFailure("spike-matching", "spike count != floor(n/2)");
    }

    // final independent verification
    CrownReport report = verify_crown(g, result.crown, /*require_spanning=*/true);
    if (!report.valid) {
        std::string all;
        for (const auto& v : report.violations) all += v + "; ";
        throw StageFailure("final-verify", "constructed crown failed verification", all);
    }
    result.square_order = square_hamilton_order(result.crown, n);
    SquareHamiltonCheck sq = verify_square_hamilton(g, result.square_order);
    if (!sq.ok)
        throw StageFailure("final-verify", "square-Hamilton order failed verification: " +
                                               sq.reason);
    return result;
}

}  // namespace crown
