#pragma once

#include <string>
#include <vector>

#include "crown/graph.hpp"

namespace crown {

// Cycle plus spikes. Each spike is (cycle vertex, outside vertex); the crown
// is valid when the cycle is a simple host cycle, every spike is a host edge
// meeting the cycle in exactly its first endpoint, and spikes are pairwise
// vertex-disjoint.
struct Crown {
    std::vector<Vertex> cycle;
    std::vector<Edge> spikes;  // {on-cycle vertex, outside vertex}
};

struct CrownReport {
    bool valid = false;
    bool spanning = false;        // |V(C)| + |spikes| == n
    bool spike_count_ok = false;  // |spikes| == floor(n/2)
    std::vector<std::string> violations;
};

// Independent validity check; trusts nothing about how the crown was made.
// When require_spanning, the spanning and spike-count clauses are part of
// validity; otherwise they are reported but nonbinding.
CrownReport verify_crown(const Graph& g, const Crown& crown, bool require_spanning = true);

struct SquareHamiltonCertificate {
    std::vector<Vertex> order;  // cyclic order of all n vertices
};

// Cyclic order: walk the cycle, inserting each spike's outside vertex right
// after its cycle vertex. Rejects non-spanning crowns.
SquareHamiltonCertificate square_hamilton_order(const Crown& crown, Vertex n);

struct SquareHamiltonCheck {
    bool ok = false;
    Vertex witness_a = -1;  // first consecutive pair at distance > 2, if any
    Vertex witness_b = -1;
    std::string reason;
};

// True iff order is a permutation of V and every cyclically consecutive pair
// is at distance <= 2 in g (checked by sorted neighbor-list intersection,
// never by materializing the square).
SquareHamiltonCheck verify_square_hamilton(const Graph& g, const SquareHamiltonCertificate& cert);

}  // namespace crown
