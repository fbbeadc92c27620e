#include "crown/certify.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace crown {

CrownReport verify_crown(const Graph& g, const Crown& crown, bool require_spanning) {
    CrownReport report;
    const Vertex n = g.num_vertices();
    auto fail = [&report](const std::string& clause) { report.violations.push_back(clause); };

    const auto& cyc = crown.cycle;
    if (cyc.size() < 3) fail("cycle: fewer than 3 vertices");
    std::vector<char> on_cycle(static_cast<std::size_t>(n), 0);
    for (Vertex v : cyc) {
        if (v < 0 || v >= n) {
            fail("cycle: vertex out of range");
            report.valid = false;
            return report;
        }
        if (on_cycle[static_cast<std::size_t>(v)]) fail("cycle: repeated vertex " + std::to_string(v));
        on_cycle[static_cast<std::size_t>(v)] = 1;
    }
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        Vertex u = cyc[i];
        Vertex v = cyc[(i + 1) % cyc.size()];
        if (!g.has_edge(u, v))
            fail("cycle: missing host edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }

    std::vector<char> spike_end(static_cast<std::size_t>(n), 0);
    for (const Edge& s : crown.spikes) {
        if (s.u < 0 || s.u >= n || s.v < 0 || s.v >= n) {
            fail("spike: vertex out of range");
            continue;
        }
        if (!g.has_edge(s.u, s.v))
            fail("spike: not a host edge (" + std::to_string(s.u) + "," + std::to_string(s.v) + ")");
        bool u_on = on_cycle[static_cast<std::size_t>(s.u)];
        bool v_on = on_cycle[static_cast<std::size_t>(s.v)];
        if (u_on == v_on)
            fail("spike: (" + std::to_string(s.u) + "," + std::to_string(s.v) +
                 ") must have exactly one endpoint on the cycle");
        for (Vertex w : {s.u, s.v}) {
            if (spike_end[static_cast<std::size_t>(w)])
                fail("spike: vertex " + std::to_string(w) + " shared by two spikes");
            spike_end[static_cast<std::size_t>(w)] = 1;
        }
    }

    report.spanning =
        static_cast<std::int64_t>(cyc.size()) + static_cast<std::int64_t>(crown.spikes.size()) ==
        static_cast<std::int64_t>(n);
    // a spanning crown must place every non-cycle vertex at the outer end of
    // exactly one spike; endpoint disjointness plus the count gives that
    report.spike_count_ok =
        static_cast<std::int64_t>(crown.spikes.size()) == static_cast<std::int64_t>(n) / 2;
    if (require_spanning) {
        if (!report.spanning) fail("spanning: |V(C)| + |spikes| != n");
        if (!report.spike_count_ok) fail("spike-count: expected floor(n/2) spikes");
    }

    report.valid = report.violations.empty();
    return report;
}

SquareHamiltonCertificate square_hamilton_order(const Crown& crown, Vertex n) {
    std::int64_t covered =
        static_cast<std::int64_t>(crown.cycle.size()) + static_cast<std::int64_t>(crown.spikes.size());
    if (covered != static_cast<std::int64_t>(n))
        throw PreconditionError("square_hamilton_order: crown does not span all " +
                                std::to_string(n) + " vertices");
    std::unordered_set<Vertex> cyc_set(crown.cycle.begin(), crown.cycle.end());
    std::unordered_map<Vertex, Vertex> partner;  // cycle vertex -> outside vertex
    partner.reserve(crown.spikes.size() * 2);
    for (const Edge& s : crown.spikes) {
        Vertex on = cyc_set.count(s.u) ? s.u : s.v;
        Vertex off = on == s.u ? s.v : s.u;
        if (!cyc_set.count(on) || cyc_set.count(off))
            throw PreconditionError("square_hamilton_order: spike lacking exactly one cycle endpoint");
        if (!partner.emplace(on, off).second)
            throw PreconditionError("square_hamilton_order: two spikes on cycle vertex " +
                                    std::to_string(on));
    }
    SquareHamiltonCertificate cert;
    cert.order.reserve(static_cast<std::size_t>(n));
    for (Vertex v : crown.cycle) {
        cert.order.push_back(v);
        auto it = partner.find(v);
        if (it != partner.end()) cert.order.push_back(it->second);
    }
    return cert;
}

SquareHamiltonCheck verify_square_hamilton(const Graph& g,
                                           const SquareHamiltonCertificate& cert) {
    SquareHamiltonCheck check;
    const Vertex n = g.num_vertices();
    if (static_cast<std::int64_t>(cert.order.size()) != static_cast<std::int64_t>(n)) {
        check.reason = "order length != n";
        return check;
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (Vertex v : cert.order) {
        if (v < 0 || v >= n) {
            check.reason = "vertex out of range";
            return check;
        }
        if (seen[static_cast<std::size_t>(v)]) {
            check.reason = "repeated vertex " + std::to_string(v);
            check.witness_a = v;
            return check;
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }

    auto within_two = [&g](Vertex a, Vertex b) {
        if (g.has_edge(a, b)) return true;
        // common neighbor by sorted-list intersection
        auto na = g.neighbors(a);
        auto nb = g.neighbors(b);
        std::size_t i = 0, j = 0;
        while (i < na.size() && j < nb.size()) {
            if (na[i] == nb[j]) return true;
            if (na[i] < nb[j])
                ++i;
            else
                ++j;
        }
        return false;
    };

    for (std::size_t i = 0; i < cert.order.size(); ++i) {
        Vertex a = cert.order[i];
        Vertex b = cert.order[(i + 1) % cert.order.size()];
        if (!within_two(a, b)) {
            check.witness_a = a;
            check.witness_b = b;
            check.reason = "consecutive pair at distance > 2";
            return check;
        }
    }
    check.ok = true;
    return check;
}

}  // namespace crown
