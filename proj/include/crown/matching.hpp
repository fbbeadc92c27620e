#pragma once

#include <cstdint>
#include <vector>

#include "crown/types.hpp"

namespace crown {

struct MatchingResult {
    std::int64_t size = 0;
    std::vector<int> match_left;   // left index -> right index or -1
    std::vector<int> match_right;  // right index -> left index or -1
    // When the left side is unsaturated: a Hall violator X on the left with
    // |N(X)| < |X| (the alternating-reachability closure of the free lefts),
    // together with its neighborhood.
    std::vector<int> hall_violator;
    std::vector<int> hall_neighborhood;
};

// Maximum matching in a bipartite graph given as left-side adjacency lists.
MatchingResult hopcroft_karp(int n_left, int n_right,
                             const std::vector<std::vector<int>>& adj_left);

}  // namespace crown
