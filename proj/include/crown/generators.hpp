#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "crown/certify.hpp"
#include "crown/graph.hpp"

namespace crown {

// Simple d-regular graph via the pairing model. Small d restarts on any
// self-loop/multi-edge; d > sqrt(n) repairs collisions with degree-preserving
// switchings. Deterministic in (n, d, seed).
Graph random_regular(Vertex n, Vertex d, std::uint64_t seed);

// Quadratic-residue graph on Z_q, q prime with q = 1 (mod 4);
// (q-1)/2-regular with lambda = (sqrt(q)+1)/2.
Graph paley(Vertex q);

// Graph that is exactly a crown: a cycle of the given length with one spike
// hanging off each listed cycle position. Ground truth for verifier tests.
std::pair<Graph, Crown> crown_fixture(Vertex cycle_len, std::span<const Vertex> spike_positions);

}  // namespace crown
