#include "crown/generators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "crown/rng.hpp"

namespace crown {

namespace {

// adjacency membership during generation: full bitmatrix when affordable,
// hash set of packed pairs otherwise
class EdgeMembership {
public:
    EdgeMembership(Vertex n, std::int64_t expected_edges) : n_(n) {
        use_matrix_ = static_cast<std::int64_t>(n) * n <= (std::int64_t{1} << 33);  // <= 1 GiB bits
        if (use_matrix_)
            bits_.assign((static_cast<std::size_t>(n) * n + 63) / 64, 0);
        else
            set_.reserve(static_cast<std::size_t>(expected_edges) * 2);
    }

    bool contains(Vertex u, Vertex v) const {
        if (use_matrix_) {
            std::size_t idx = static_cast<std::size_t>(u) * n_ + v;
            return (bits_[idx >> 6] >> (idx & 63)) & 1u;
        }
        return set_.count(key(u, v)) > 0;
    }

    void insert(Vertex u, Vertex v) {
        if (use_matrix_) {
            set_bit(u, v);
            set_bit(v, u);
        } else {
            set_.insert(key(u, v));
        }
    }

    void erase(Vertex u, Vertex v) {
        if (use_matrix_) {
            clear_bit(u, v);
            clear_bit(v, u);
        } else {
            set_.erase(key(u, v));
        }
    }

private:
    std::uint64_t key(Vertex u, Vertex v) const {
        if (u > v) std::swap(u, v);
        return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    }
    void set_bit(Vertex u, Vertex v) {
        std::size_t idx = static_cast<std::size_t>(u) * n_ + v;
        bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
    }
    void clear_bit(Vertex u, Vertex v) {
        std::size_t idx = static_cast<std::size_t>(u) * n_ + v;
        bits_[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
    }

    Vertex n_;
    bool use_matrix_ = false;
    std::vector<std::uint64_t> bits_;
    std::unordered_set<std::uint64_t> set_;
};

}  // namespace

Graph random_regular(Vertex n, Vertex d, std::uint64_t seed) {
    if (d < 0 || d >= n) throw PreconditionError("random_regular requires 0 <= d < n");
    if ((static_cast<std::int64_t>(n) * d) % 2 != 0)
        throw PreconditionError("random_regular: n*d must be even (n=" + std::to_string(n) +
                                ", d=" + std::to_string(d) + ")");
    if (d == 0) return Graph::build(n, {});

    Rng rng(Rng::mix(seed ^ 0xC0FFEEull));
    // Restart-only succeeds with probability ~exp(-(d-1)^2/4 - (d-1)/2)
    // independent of n, so it is only viable for very small d; beyond that,
    // collisions are repaired with degree-preserving switchings.
    const int restart_cap = d <= 4 ? 200 : 0;
    const int max_attempts = restart_cap + 100;
    std::vector<Vertex> stubs(static_cast<std::size_t>(n) * d);

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (Vertex v = 0; v < n; ++v)
            for (Vertex j = 0; j < d; ++j) stubs[static_cast<std::size_t>(v) * d + j] = v;
        rng.shuffle(stubs);

        std::vector<Edge> edges;
        edges.reserve(stubs.size() / 2);
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
            edges.push_back({stubs[i], stubs[i + 1]});

        EdgeMembership member(n, static_cast<std::int64_t>(edges.size()));
        std::vector<std::size_t> bad;
        std::vector<char> is_bad(edges.size(), 0);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [u, v] = edges[i];
            if (u == v || member.contains(u, v)) {
                bad.push_back(i);
                is_bad[i] = 1;
            } else {
                member.insert(u, v);
            }
        }

        if (!bad.empty() && attempt < restart_cap) continue;

        // switching repair: replace {a,b},{c,e} with {a,c},{b,e} where {a,b}
        // is a colliding pairing and {c,e} a random clean edge
        std::int64_t budget = 200 * static_cast<std::int64_t>(bad.size()) + 10000;
        bool ok = true;
        while (!bad.empty()) {
            if (--budget < 0) {
                ok = false;
                break;
            }
            std::size_t i = bad.back();
            auto [a, b] = edges[i];
            std::size_t j = rng.uniform(edges.size());
            auto [c, e] = edges[j];
            if (is_bad[j]) continue;
            if (a == c || b == e) continue;
            if (member.contains(a, c) || member.contains(b, e)) continue;
            member.erase(c, e);
            member.insert(a, c);
            member.insert(b, e);
            edges[i] = {a, c};
            edges[j] = {b, e};
            is_bad[i] = 0;
            bad.pop_back();
        }
        if (!ok) continue;  // restart

        std::size_t dups = 0;
        Graph g = Graph::build(n, edges, &dups);
        if (dups != 0 || !g.is_regular() || g.degree_min() != d)
            throw StageFailure("random_regular", "internal repair left a non-simple pairing");
        return g;
    }
    throw StageFailure("random_regular",
                       "restart budget exhausted for n=" + std::to_string(n) +
                           ", d=" + std::to_string(d));
}

Graph paley(Vertex q) {
    if (q < 5) throw PreconditionError("paley: q must be a prime >= 5");
    for (Vertex f = 2; static_cast<std::int64_t>(f) * f <= q; ++f)
        if (q % f == 0) throw PreconditionError("paley: q=" + std::to_string(q) + " is composite");
    if (q % 4 != 1)
        throw PreconditionError("paley: q=" + std::to_string(q) + " is not 1 mod 4");

    std::vector<bool> residue(static_cast<std::size_t>(q), false);
    for (std::int64_t k = 1; k <= (q - 1) / 2; ++k)
        residue[static_cast<std::size_t>((k * k) % q)] = true;

    std::vector<Edge> edges;
    for (Vertex u = 0; u < q; ++u)
        for (Vertex v = u + 1; v < q; ++v)
            if (residue[static_cast<std::size_t>((v - u) % q)]) edges.push_back({u, v});
    return Graph::build(q, edges);
}

std::pair<Graph, Crown> crown_fixture(Vertex cycle_len, std::span<const Vertex> spike_positions) {
    if (cycle_len < 3) throw PreconditionError("crown_fixture: cycle length must be >= 3");
    std::vector<Vertex> pos(spike_positions.begin(), spike_positions.end());
    std::sort(pos.begin(), pos.end());
    if (std::adjacent_find(pos.begin(), pos.end()) != pos.end())
        throw PreconditionError("crown_fixture: duplicate spike position");
    for (Vertex p : pos)
        if (p < 0 || p >= cycle_len)
            throw PreconditionError("crown_fixture: spike position off the cycle");

    Vertex n = cycle_len + static_cast<Vertex>(pos.size());
    std::vector<Edge> edges;
    Crown crown;
    for (Vertex i = 0; i < cycle_len; ++i) {
        edges.push_back({i, static_cast<Vertex>((i + 1) % cycle_len)});
        crown.cycle.push_back(i);
    }
    Vertex next_outside = cycle_len;
    for (Vertex p : pos) {
        edges.push_back({p, next_outside});
        crown.spikes.push_back({p, next_outside});
        ++next_outside;
    }
    return {Graph::build(n, edges), crown};
}

}  // namespace crown
