#include "gravnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gravnet {

namespace {

constexpr std::size_t kBruteForceCutoff = 64;
constexpr std::size_t kLeafSize = 16;

struct Candidate {
    double d2;
    uint32_t index;
    bool operator<(const Candidate& o) const {
        return d2 < o.d2 || (d2 == o.d2 && index < o.index);
    }
};

// Fixed-capacity best-k set ordered by (distance^2, index).
class BestK {
public:
    explicit BestK(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

    void offer(double d2, uint32_t index) {
        Candidate c{d2, index};
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    bool full() const { return heap_.size() == k_; }
    double worst_d2() const { return heap_.front().d2; }

    std::vector<uint32_t> sorted_indices() {
        std::sort(heap_.begin(), heap_.end());
        std::vector<uint32_t> out(heap_.size());
        for (std::size_t i = 0; i < heap_.size(); ++i) out[i] = heap_[i].index;
        return out;
    }

private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

struct KdNode {
    // Leaf when axis < 0: [begin, end) into the index array.
    int axis = -1;
    double split = 0.0;
    std::size_t begin = 0, end = 0;
    int left = -1, right = -1;
};

class KdTree {
public:
    explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
        indices_.resize(points.size());
        std::iota(indices_.begin(), indices_.end(), 0u);
        nodes_.reserve(2 * points.size() / kLeafSize + 2);
        root_ = build(0, points.size());
    }

    void query(const Vec3& q, uint32_t self, BestK& best) const {
        search(root_, q, self, best);
    }

private:
    static double component(const Vec3& p, int axis) {
        return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
    }

    int build(std::size_t begin, std::size_t end) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        if (end - begin <= kLeafSize) {
            nodes_[id].begin = begin;
            nodes_[id].end = end;
            return id;
        }
        // Split along the axis with the widest spread.
        Vec3 lo = points_[indices_[begin]], hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const Vec3& p = points_[indices_[i]];
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        const Vec3 extent = hi - lo;
        int axis = 0;
        if (extent.y > component(extent, axis)) axis = 1;
        if (extent.z > component(extent, axis)) axis = 2;

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(indices_.begin() + begin, indices_.begin() + mid,
                         indices_.begin() + end, [&](uint32_t a, uint32_t b) {
                             return component(points_[a], axis) < component(points_[b], axis);
                         });
        const double split = component(points_[indices_[mid]], axis);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[id].axis = axis;
        nodes_[id].split = split;
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void search(int node_id, const Vec3& q, uint32_t self, BestK& best) const {
        const KdNode& node = nodes_[node_id];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const uint32_t idx = indices_[i];
                if (idx == self) continue;
                best.offer(norm2(points_[idx] - q), idx);
            }
            return;
        }
        const double delta = component(q, node.axis) - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search(near, q, self, best);
        if (!best.full() || delta * delta <= best.worst_d2())
            search(far, q, self, best);
    }

    const std::vector<Vec3>& points_;
    std::vector<uint32_t> indices_;
    std::vector<KdNode> nodes_;
    int root_ = -1;
};

} // namespace

std::vector<std::vector<uint32_t>> knn_neighbors(const std::vector<Vec3>& positions,
                                                 std::size_t k) {
    const std::size_t n = positions.size();
    if (n < 2)
        throw std::invalid_argument("knn_neighbors: need at least 2 points");
    if (k < 1)
        throw std::invalid_argument("knn_neighbors: k must be >= 1");
    const std::size_t kk = std::min(k, n - 1);

    std::vector<std::vector<uint32_t>> out(n);
    if (n <= kBruteForceCutoff) {
        for (std::size_t i = 0; i < n; ++i) {
            BestK best(kk);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                best.offer(norm2(positions[j] - positions[i]), static_cast<uint32_t>(j));
            }
            out[i] = best.sorted_indices();
        }
        return out;
    }

    KdTree tree(positions);
    for (std::size_t i = 0; i < n; ++i) {
        BestK best(kk);
        tree.query(positions[i], static_cast<uint32_t>(i), best);
        out[i] = best.sorted_indices();
    }
    return out;
}

FrameGraph build_graph(const std::vector<Vec3>& positions, Matrix features,
                       Matrix labels, const GraphConfig& config) {
    const std::size_t n = positions.size();
    if (features.rows != n || labels.rows != n || labels.cols != 3)
        throw std::invalid_argument("build_graph: dimension mismatch");

    FrameGraph graph;
    graph.k = config.k;
    graph.node_features = std::move(features);
    graph.labels = std::move(labels);

    const auto neighbors = knn_neighbors(positions, config.k);
    graph.edges.reserve(n * std::min(config.k, n - 1));
    for (uint32_t dst = 0; dst < n; ++dst)
        for (uint32_t src : neighbors[dst]) {
            graph.edges.emplace_back(src, dst);
            if (config.with_edge_attrs)
                graph.edge_attrs.push_back(norm(positions[dst] - positions[src]));
        }
    return graph;
}

} // namespace gravnet
