#include "crown/matchmaker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crown/rng.hpp"

namespace crown {

MatchmakerTriple split_matchmakers(const Graph& g, double delta1, std::uint64_t seed,
                                   std::int64_t max_resamples) {
    if (!(delta1 > 0.0 && delta1 < 1.0 / 3.0))
        throw PreconditionError("split_matchmakers: delta1 must lie in (0, 1/3)");
    if (!g.is_regular())
        throw PreconditionError("split_matchmakers: graph must be regular");
    Vertex n = g.num_vertices();
    Vertex d = g.degree_min();
    int K = static_cast<int>(std::ceil(2.0 / delta1));
    Vertex threshold = d / (2 * K);
    if (threshold < 1)
        throw PreconditionError("split_matchmakers: d=" + std::to_string(d) +
                                " too small, floor(d/2K)=0 with K=" + std::to_string(K) +
                                "; need d >= " + std::to_string(2 * K));

    Rng rng(Rng::mix(seed ^ 0x5711ull));
    std::vector<int> color(static_cast<std::size_t>(n));
    // cnt[v*K + i] = number of neighbors of v colored i
    std::vector<Vertex> cnt(static_cast<std::size_t>(n) * K, 0);

    auto assign = [&](Vertex u, int c) {
        int old = color[static_cast<std::size_t>(u)];
        if (old == c) return;
        color[static_cast<std::size_t>(u)] = c;
        for (Vertex w : g.neighbors(u)) {
            std::size_t base = static_cast<std::size_t>(w) * K;
            --cnt[base + static_cast<std::size_t>(old)];
            ++cnt[base + static_cast<std::size_t>(c)];
        }
    };

    for (Vertex v = 0; v < n; ++v) color[static_cast<std::size_t>(v)] = static_cast<int>(rng.uniform(K));
    for (Vertex v = 0; v < n; ++v)
        for (Vertex w : g.neighbors(v))
            ++cnt[static_cast<std::size_t>(v) * K + color[static_cast<std::size_t>(w)]];

    auto first_violated = [&]() -> std::pair<Vertex, int> {
        for (Vertex v = 0; v < n; ++v) {
            std::size_t base = static_cast<std::size_t>(v) * K;
            for (int i = 0; i < K; ++i)
                if (cnt[base + static_cast<std::size_t>(i)] < threshold) return {v, i};
        }
        return {-1, -1};
    };

    std::int64_t used = 0;
    for (;;) {
        auto [v, i] = first_violated();
        if (v < 0) break;
        if (used >= max_resamples) {
            std::vector<std::pair<Vertex, int>> still;
            for (Vertex u = 0; u < n; ++u) {
                std::size_t base = static_cast<std::size_t>(u) * K;
                for (int c = 0; c < K; ++c)
                    if (cnt[base + static_cast<std::size_t>(c)] < threshold) {
                        still.push_back({u, c});
                        if (still.size() >= 64) break;
                    }
                if (still.size() >= 64) break;
            }
            throw MatchmakerError(
                "split_matchmakers: resample budget " + std::to_string(max_resamples) +
                    " exhausted with events still violated (first at vertex " +
                    std::to_string(v) + ", color " + std::to_string(i) + ")",
                std::move(still), used);
        }
        ++used;
        assign(v, static_cast<int>(rng.uniform(K)));
        for (Vertex u : g.neighbors(v)) assign(u, static_cast<int>(rng.uniform(K)));
    }

    // pick the three smallest classes, ties by class index
    std::vector<std::pair<Vertex, int>> sizes(static_cast<std::size_t>(K));
    for (int c = 0; c < K; ++c) sizes[static_cast<std::size_t>(c)] = {0, c};
    for (Vertex v = 0; v < n; ++v) ++sizes[static_cast<std::size_t>(color[static_cast<std::size_t>(v)])].first;
    std::sort(sizes.begin(), sizes.end());

    MatchmakerTriple out;
    out.color_count = K;
    out.threshold = threshold;
    out.resamples_used = used;
    VertexSet* sets[3] = {&out.s1, &out.s2, &out.s3};
    for (int k = 0; k < 3; ++k) {
        *sets[k] = VertexSet(n);
        int cls = sizes[static_cast<std::size_t>(k)].second;
        for (Vertex v = 0; v < n; ++v)
            if (color[static_cast<std::size_t>(v)] == cls) sets[k]->insert(v);
    }
    out.guaranteed_deg = d;
    for (Vertex v = 0; v < n; ++v) {
        for (int k = 0; k < 3; ++k) {
            Vertex c = 0;
            for (Vertex w : g.neighbors(v))
                if (sets[k]->contains(w)) ++c;
            out.guaranteed_deg = std::min(out.guaranteed_deg, c);
        }
    }
    if (out.guaranteed_deg < threshold)
        throw StageFailure("split_matchmakers",
                           "postcondition failed: achieved degree below threshold");
    return out;
}

}  // namespace crown
