#include "aoirelay/matching.hpp"

#include <algorithm>
#include <limits>

namespace aoirelay {
namespace {

// Minimum-cost perfect assignment on an n x n matrix (1-based potentials).
// Returns, for each row, its assigned column.
std::vector<std::size_t> hungarian_assign(const std::vector<std::int64_t>& cost, std::size_t n) {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        row_of[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of[j0];
            std::int64_t delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col_of_row(n, 0);
    for (std::size_t j = 1; j <= n; ++j) {
        if (row_of[j] != 0) col_of_row[row_of[j] - 1] = j - 1;
    }
    return col_of_row;
}

// Optimum over the lefts not in `skip_left` and rights not in `skip_right`.
std::uint64_t restricted_optimum(const WeightedBipartiteGraph& g, const std::vector<char>& skip_left,
                                 const std::vector<char>& skip_right) {
    std::vector<std::size_t> lefts, rights;
    for (std::size_t l = 0; l < g.n_left(); ++l) {
        if (!skip_left[l]) lefts.push_back(l);
    }
    for (std::size_t r = 0; r < g.n_right(); ++r) {
        if (!skip_right[r]) rights.push_back(r);
    }
    const std::size_t n = std::max(lefts.size(), rights.size());
    if (lefts.empty() || rights.empty()) return 0;
    // Maximizing positive weights: non-edges and padding cost 0, so unmatched
    // vertices are free and the assignment optimum equals the matching optimum.
    std::vector<std::int64_t> cost(n * n, 0);
    for (std::size_t a = 0; a < lefts.size(); ++a) {
        for (std::size_t b = 0; b < rights.size(); ++b) {
            if (g.has_edge(lefts[a], rights[b])) {
                cost[a * n + b] = -static_cast<std::int64_t>(g.weight(lefts[a]));
            }
        }
    }
    const auto assign = hungarian_assign(cost, n);
    std::uint64_t total = 0;
    for (std::size_t a = 0; a < lefts.size(); ++a) {
        total += static_cast<std::uint64_t>(-cost[a * n + assign[a]]);
    }
    return total;
}

} // namespace

WeightedBipartiteGraph::WeightedBipartiteGraph(std::size_t n_left, std::size_t n_right)
    : n_right_(n_right), weights_(n_left, 1), adjacency_(n_left * n_right, 0) {}

std::uint64_t max_matching_weight(const WeightedBipartiteGraph& graph) {
    return restricted_optimum(graph, std::vector<char>(graph.n_left(), 0), std::vector<char>(graph.n_right(), 0));
}

Matching max_weight_matching(const WeightedBipartiteGraph& graph) {
    Matching out;
    const std::size_t n_left = graph.n_left();
    const std::size_t n_right = graph.n_right();
    if (n_left == 0 || n_right == 0) return out;

    std::vector<char> done_left(n_left, 0), used_right(n_right, 0);
    const std::uint64_t target = restricted_optimum(graph, done_left, used_right);
    std::uint64_t fixed = 0;

    // Fix lefts one by one, each taking the lowest channel (or, failing that,
    // staying unmatched) that still completes to the optimum.
    for (std::size_t l = 0; l < n_left; ++l) {
        done_left[l] = 1;
        bool placed = false;
        for (std::size_t r = 0; r < n_right && !placed; ++r) {
            if (used_right[r] || !graph.has_edge(l, r)) continue;
            used_right[r] = 1;
            if (fixed + graph.weight(l) + restricted_optimum(graph, done_left, used_right) == target) {
                fixed += graph.weight(l);
                out.pairs.push_back({l, r});
                placed = true;
            } else {
                used_right[r] = 0;
            }
        }
        // Unmatched is always feasible here: some optimal completion exists
        // and it did not use any of the channels rejected above for l.
    }
    out.total_weight = fixed;
    return out;
}

} // namespace aoirelay
