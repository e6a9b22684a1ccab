#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aoirelay {

/// Bipartite graph with weights on the left vertices. Left vertices are
/// transmit candidates, right vertices are channels.
class WeightedBipartiteGraph {
public:
    WeightedBipartiteGraph() = default;
    WeightedBipartiteGraph(std::size_t n_left, std::size_t n_right);

    std::size_t n_left() const noexcept { return weights_.size(); }
    std::size_t n_right() const noexcept { return n_right_; }

    std::uint64_t weight(std::size_t left) const { return weights_[left]; }
    void set_weight(std::size_t left, std::uint64_t weight) { weights_[left] = weight; }

    bool has_edge(std::size_t left, std::size_t right) const {
        return adjacency_[left * n_right_ + right] != 0;
    }
    void add_edge(std::size_t left, std::size_t right) { adjacency_[left * n_right_ + right] = 1; }
    void remove_edge(std::size_t left, std::size_t right) { adjacency_[left * n_right_ + right] = 0; }

private:
    std::size_t n_right_ = 0;
    std::vector<std::uint64_t> weights_;
    std::vector<std::uint8_t> adjacency_;
};

struct MatchedPair {
    std::size_t left = 0;
    std::size_t right = 0;

    bool operator==(const MatchedPair&) const = default;
};

struct Matching {
    std::vector<MatchedPair> pairs; // ascending left index
    std::uint64_t total_weight = 0;
};

/// Optimal matching weight via the Hungarian method, O(V^3) with
/// V = max(n_left, n_right).
std::uint64_t max_matching_weight(const WeightedBipartiteGraph& graph);

/// A maximum-weight matching. Among optimal matchings the result is the one
/// where, scanning left vertices in ascending order, each takes the lowest
/// channel it can while keeping the optimum reachable (being matched is
/// preferred to being left out).
Matching max_weight_matching(const WeightedBipartiteGraph& graph);

} // namespace aoirelay
