#include <gtest/gtest.h>

#include <cstddef>
#include <vector>

#include "faultrank/kdtree.hpp"
#include "faultrank/rng.hpp"
#include "support/oracles.hpp"

using namespace faultrank;

namespace {

std::vector<double> random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> pts(n * d);
    for (auto& x : pts) x = rng.uniform(-1.0, 1.0);
    return pts;
}

}  // namespace

TEST(KdTree, CountsMatchBruteForce) {
    for (std::size_t d : {1u, 2u, 4u}) {
        const std::size_t n = 300;
        const auto pts = random_points(n, d, 17 + d);
        const KdTree tree(pts.data(), n, d);
        for (std::size_t i = 0; i < n; i += 7) {
            const double* q = pts.data() + i * d;
            for (double r : {0.05, 0.3, 1.0}) {
                for (bool strict : {false, true}) {
                    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(i) - 3;
                    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(i) + 3;
                    EXPECT_EQ(tree.count_within(q, r, strict, lo, hi),
                              oracles::brute_count_within(pts, n, d, q, r, strict, lo, hi))
                        << "d=" << d << " i=" << i << " r=" << r << " strict=" << strict;
                }
            }
        }
    }
}

TEST(KdTree, KthDistanceMatchesBruteForce) {
    for (std::size_t d : {1u, 3u}) {
        const std::size_t n = 250;
        const auto pts = random_points(n, d, 99 + d);
        const KdTree tree(pts.data(), n, d);
        for (std::size_t i = 0; i < n; i += 11) {
            const double* q = pts.data() + i * d;
            for (std::size_t k : {1u, 4u, 10u}) {
                const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(i) - 2;
                const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(i) + 2;
                EXPECT_DOUBLE_EQ(tree.kth_distance(q, k, lo, hi),
                                 oracles::brute_kth_distance(pts, n, d, q, k, lo, hi))
                    << "d=" << d << " i=" << i << " k=" << k;
            }
        }
    }
}

TEST(KdTree, ExclusionBandCanExhaustNeighbours) {
    const std::size_t n = 10;
    const auto pts = random_points(n, 2, 5);
    const KdTree tree(pts.data(), n, 2);
    const double dist = tree.kth_distance(pts.data(), 4, -100, 100);
    EXPECT_TRUE(std::isinf(dist));
}

TEST(KdTree, DuplicatePointsCounted) {
    std::vector<double> pts(20, 0.5);  // 10 identical 2-d points
    const KdTree tree(pts.data(), 10, 2);
    EXPECT_EQ(tree.count_within(pts.data(), 0.1, false, -1, -1), 10u);
    EXPECT_EQ(tree.count_within(pts.data(), 0.1, true, -1, -1), 10u);
    EXPECT_EQ(tree.count_within(pts.data(), 0.0, true, -1, -1), 0u);
    EXPECT_DOUBLE_EQ(tree.kth_distance(pts.data(), 3, 0, 0), 0.0);
}

TEST(KdTree, RejectsEmptyInput) {
    std::vector<double> pts;
    EXPECT_THROW(KdTree(pts.data(), 0, 2), ParamError);
}
