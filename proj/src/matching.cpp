#include "crown/matching.hpp"

#include <limits>
#include <queue>
#include <vector>

namespace crown {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

struct HkState {
    int nl, nr;
    const std::vector<std::vector<int>>* adj;
    std::vector<int> ml, mr, dist;

    bool bfs() {
        std::queue<int> q;
        for (int u = 0; u < nl; ++u) {
            if (ml[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] = 0;
                q.push(u);
            } else {
                dist[static_cast<std::size_t>(u)] = kInf;
            }
        }
        bool found = false;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : (*adj)[static_cast<std::size_t>(u)]) {
                int w = mr[static_cast<std::size_t>(v)];
                if (w < 0) {
                    found = true;
                } else if (dist[static_cast<std::size_t>(w)] == kInf) {
                    dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    }

    bool dfs(int u) {
        for (int v : (*adj)[static_cast<std::size_t>(u)]) {
            int w = mr[static_cast<std::size_t>(v)];
            if (w < 0 || (dist[static_cast<std::size_t>(w)] ==
                              dist[static_cast<std::size_t>(u)] + 1 &&
                          dfs(w))) {
                ml[static_cast<std::size_t>(u)] = v;
                mr[static_cast<std::size_t>(v)] = u;
                return true;
            }
        }
        dist[static_cast<std::size_t>(u)] = kInf;
        return false;
    }
};

}  // namespace

MatchingResult hopcroft_karp(int n_left, int n_right,
                             const std::vector<std::vector<int>>& adj_left) {
    HkState st;
    st.nl = n_left;
    st.nr = n_right;
    st.adj = &adj_left;
    st.ml.assign(static_cast<std::size_t>(n_left), -1);
    st.mr.assign(static_cast<std::size_t>(n_right), -1);
    st.dist.assign(static_cast<std::size_t>(n_left), kInf);

    MatchingResult out;
    while (st.bfs()) {
        for (int u = 0; u < n_left; ++u)
            if (st.ml[static_cast<std::size_t>(u)] < 0 && st.dfs(u)) ++out.size;
    }

    if (out.size < n_left) {
        // After the final (failed) BFS, dist marks the lefts reachable from a
        // free left by alternating paths; their closure is a Hall violator.
        std::vector<char> in_x(static_cast<std::size_t>(n_left), 0);
        std::vector<char> in_n(static_cast<std::size_t>(n_right), 0);
        for (int u = 0; u < n_left; ++u)
            if (st.dist[static_cast<std::size_t>(u)] != kInf) in_x[static_cast<std::size_t>(u)] = 1;
        for (int u = 0; u < n_left; ++u)
            if (in_x[static_cast<std::size_t>(u)])
                for (int v : adj_left[static_cast<std::size_t>(u)])
                    in_n[static_cast<std::size_t>(v)] = 1;
        for (int u = 0; u < n_left; ++u)
            if (in_x[static_cast<std::size_t>(u)]) out.hall_violator.push_back(u);
        for (int v = 0; v < n_right; ++v)
            if (in_n[static_cast<std::size_t>(v)]) out.hall_neighborhood.push_back(v);
    }
    out.match_left = std::move(st.ml);
    out.match_right = std::move(st.mr);
    return out;
}

}  // namespace crown
