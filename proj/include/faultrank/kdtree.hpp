#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "faultrank/errors.hpp"

namespace faultrank {

/// KD-tree over points in row-major layout using the Chebyshev (max) norm,
/// the metric required by the box-kernel and k-NN entropy estimators.
///
/// Point indices are their positions in the input array, which for embedded
/// time-series states coincide with time order. Queries accept an inclusive
/// index band [exclude_lo, exclude_hi] implementing dynamic correlation
/// exclusion: points inside the band never count as neighbours.
class KdTree {
public:
    KdTree(const double* points, std::size_t count, std::size_t dims)
        : n_(count), d_(dims), raw_(points, points + count * dims) {
        if (count == 0 || dims == 0) throw ParamError("KdTree: empty point set");
        perm_.resize(n_);
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        nodes_.reserve(2 * n_ / kLeafSize + 2);
        build(0, n_);
        // Leaf-contiguous copy for cache-friendly scans.
        packed_.resize(n_ * d_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* src = raw_.data() + perm_[i] * d_;
            std::copy(src, src + d_, packed_.data() + i * d_);
        }
    }

    std::size_t size() const { return n_; }

    /// Distance to the k-th nearest neighbour of `query`, skipping points with
    /// index in [exclude_lo, exclude_hi]. Returns +inf if fewer than k
    /// neighbours are available.
    double kth_distance(const double* query, std::size_t k,
                        std::ptrdiff_t exclude_lo, std::ptrdiff_t exclude_hi) const {
        if (k == 0) throw ParamError("kth_distance: k must be positive");
        std::vector<double> heap;  // max-heap of the k best distances
        heap.reserve(k);
        knn_search(0, query, k, exclude_lo, exclude_hi, heap);
        if (heap.size() < k) return std::numeric_limits<double>::infinity();
        return heap.front();
    }

    /// Number of points within radius `r` of `query` (strict: dist < r,
    /// otherwise dist <= r), skipping the excluded index band.
    std::size_t count_within(const double* query, double r, bool strict,
                             std::ptrdiff_t exclude_lo, std::ptrdiff_t exclude_hi) const {
        std::size_t total = count_all(0, query, r, strict);
        // The exclusion band is narrow; correct by direct scan instead of
        // carrying the band through the subtree-inclusion shortcut.
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, exclude_lo);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n_) - 1,
                                                           exclude_hi);
        for (std::ptrdiff_t i = lo; i <= hi; ++i) {
            const double dist = max_norm(query, raw_.data() + static_cast<std::size_t>(i) * d_);
            if (strict ? dist < r : dist <= r) --total;
        }
        return total;
    }

private:
    static constexpr std::size_t kLeafSize = 16;

    struct Node {
        std::size_t begin = 0, end = 0;      // range into perm_/packed_
        std::int32_t left = -1, right = -1;  // children; -1 when leaf
        std::vector<double> box_lo, box_hi;
    };

    double max_norm(const double* a, const double* b) const {
        double m = 0.0;
        for (std::size_t j = 0; j < d_; ++j) m = std::max(m, std::abs(a[j] - b[j]));
        return m;
    }

    std::int32_t build(std::size_t begin, std::size_t end) {
        Node node;
        node.begin = begin;
        node.end = end;
        node.box_lo.assign(d_, std::numeric_limits<double>::infinity());
        node.box_hi.assign(d_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i) {
            const double* p = raw_.data() + perm_[i] * d_;
            for (std::size_t j = 0; j < d_; ++j) {
                node.box_lo[j] = std::min(node.box_lo[j], p[j]);
                node.box_hi[j] = std::max(node.box_hi[j], p[j]);
            }
        }
        const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(std::move(node));
        if (end - begin <= kLeafSize) return id;

        std::size_t split_dim = 0;
        double width = -1.0;
        for (std::size_t j = 0; j < d_; ++j) {
            const double w = nodes_[id].box_hi[j] - nodes_[id].box_lo[j];
            if (w > width) {
                width = w;
                split_dim = j;
            }
        }
        if (width <= 0.0) return id;  // all points identical; keep as leaf

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             return raw_[a * d_ + split_dim] < raw_[b * d_ + split_dim];
                         });
        const std::int32_t left = build(begin, mid);
        const std::int32_t right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    double box_min_dist(const Node& node, const double* q) const {
        double m = 0.0;
        for (std::size_t j = 0; j < d_; ++j) {
            double axis = 0.0;
            if (q[j] < node.box_lo[j]) axis = node.box_lo[j] - q[j];
            else if (q[j] > node.box_hi[j]) axis = q[j] - node.box_hi[j];
            m = std::max(m, axis);
        }
        return m;
    }

    double box_max_dist(const Node& node, const double* q) const {
        double m = 0.0;
        for (std::size_t j = 0; j < d_; ++j) {
            m = std::max(m, std::max(std::abs(q[j] - node.box_lo[j]),
                                     std::abs(q[j] - node.box_hi[j])));
        }
        return m;
    }

    void heap_push(std::vector<double>& heap, std::size_t k, double dist) const {
        if (heap.size() < k) {
            heap.push_back(dist);
            std::push_heap(heap.begin(), heap.end());
        } else if (dist < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = dist;
            std::push_heap(heap.begin(), heap.end());
        }
    }

    void knn_search(std::int32_t id, const double* q, std::size_t k,
                    std::ptrdiff_t exclude_lo, std::ptrdiff_t exclude_hi,
                    std::vector<double>& heap) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (heap.size() == k && box_min_dist(node, q) > heap.front()) return;
        if (node.left < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::ptrdiff_t orig = static_cast<std::ptrdiff_t>(perm_[i]);
                if (orig >= exclude_lo && orig <= exclude_hi) continue;
                heap_push(heap, k, max_norm(q, packed_.data() + i * d_));
            }
            return;
        }
        const double dl = box_min_dist(nodes_[static_cast<std::size_t>(node.left)], q);
        const double dr = box_min_dist(nodes_[static_cast<std::size_t>(node.right)], q);
        const std::int32_t first = dl <= dr ? node.left : node.right;
        const std::int32_t second = dl <= dr ? node.right : node.left;
        knn_search(first, q, k, exclude_lo, exclude_hi, heap);
        knn_search(second, q, k, exclude_lo, exclude_hi, heap);
    }

    std::size_t count_all(std::int32_t id, const double* q, double r, bool strict) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        const double near = box_min_dist(node, q);
        if (strict ? near >= r : near > r) return 0;
        const double far = box_max_dist(node, q);
        if (strict ? far < r : far <= r) return node.end - node.begin;
        if (node.left < 0) {
            std::size_t c = 0;
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const double dist = max_norm(q, packed_.data() + i * d_);
                if (strict ? dist < r : dist <= r) ++c;
            }
            return c;
        }
        return count_all(node.left, q, r, strict) + count_all(node.right, q, r, strict);
    }

    std::size_t n_;
    std::size_t d_;
    std::vector<double> raw_;     // original order
    std::vector<double> packed_;  // leaf-contiguous order
    std::vector<std::size_t> perm_;
    std::vector<Node> nodes_;
};

}  // namespace faultrank
