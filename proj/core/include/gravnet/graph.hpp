#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gravnet/matrix.hpp"
#include "gravnet/vec3.hpp"

namespace gravnet {

struct GraphConfig {
    std::size_t k = 8;
    bool with_edge_attrs = false;
};

// Directed KNN graph of one frame. Edges are (src j, dst i): messages flow
// from each of i's k nearest neighbours into i. Emitted destination-major,
// neighbours sorted by (distance, index).
struct FrameGraph {
    Matrix node_features;                               // N x d_in
    std::vector<std::pair<uint32_t, uint32_t>> edges;   // (src, dst)
    std::vector<double> edge_attrs;                     // |r_i - r_j| per edge; empty when disabled
    Matrix labels;                                      // N x 3
    std::size_t k = 0;
    std::size_t scene_id = 0;   // provenance for per-scene grouping
};

// For each i, the min(k, N-1) indices j != i with smallest Euclidean
// distance; ties broken by smaller index; each list sorted by (distance, index).
// kd-tree (median split, leaf size 16) with brute force for N <= 64.
std::vector<std::vector<uint32_t>> knn_neighbors(const std::vector<Vec3>& positions,
                                                 std::size_t k);

FrameGraph build_graph(const std::vector<Vec3>& positions, Matrix features,
                       Matrix labels, const GraphConfig& config);

} // namespace gravnet
