// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force reference implementations for cell graphs. Deliberately naive:
// plain vectors, full permutation search, explicit path and order enumeration.

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle
{

struct Dag
{
    std::vector<int> labels;                // any integer label per vertex
    std::vector<std::vector<int>> adj;      // adj[i][j] = 1 for edge i -> j

    int size() const { return static_cast<int>(labels.size()); }
};

// Labeled isomorphism by trying every permutation of every vertex.
inline bool isomorphic(const Dag &a, const Dag &b)
{
    const int n = a.size();
    if (n != b.size()) return false;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do
    {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) ok = a.labels[i] == b.labels[perm[i]];
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n && ok; ++j) ok = a.adj[i][j] == b.adj[perm[i]][perm[j]];
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Longest path from vertex 0 to vertex n-1 by enumerating every path.
inline int longest_path(const Dag &g)
{
    const int n = g.size();
    int best = -1;
    std::function<void(int, int)> walk = [&](int v, int length) {
        if (v == n - 1) best = std::max(best, length);
        for (int w = 0; w < n; ++w)
            if (g.adj[v][w]) walk(w, length + 1);
    };
    walk(0, 0);
    return best;
}

// Maximum number of edges leaving a prefix, over every topological order and
// every proper prefix of it that contains vertex 0 and not vertex n-1.
inline int max_prefix_cut(const Dag &g)
{
    const int n = g.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    int best = 0;
    do
    {
        std::vector<int> pos(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pos[order[i]] = i;
        bool topological = true;
        for (int i = 0; i < n && topological; ++i)
            for (int j = 0; j < n && topological; ++j)
                if (g.adj[i][j] && pos[i] > pos[j]) topological = false;
        if (!topological) continue;
        for (int k = 1; k < n; ++k)
        {
            int cut = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (g.adj[i][j] && pos[i] < k && pos[j] >= k) ++cut;
            best = std::max(best, cut);
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

}  // namespace oracle
