#include <gtest/gtest.h>

#include <random>

#include "uatpc/kdtree.hpp"

using namespace uatpc;

namespace {

std::vector<std::size_t> brute(const std::vector<Point3>& pts, const Point3& c, double r)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = pts[i][0] - c[0];
        const double dy = pts[i][1] - c[1];
        const double dz = pts[i][2] - c[2];
        if (dx * dx + dy * dy + dz * dz <= r * r) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace

TEST(KdTree, MatchesPairwiseOracle)
{
    std::mt19937_64 rng(1);
    for (std::size_t n : {1u, 2u, 7u, 100u, 2000u}) {
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        std::vector<Point3> pts(n);
        for (auto& p : pts) {
            p = {u(rng), u(rng), u(rng)};
        }
        // Duplicates and exact-boundary points.
        if (n > 3) {
            pts[1] = pts[0];
            pts[2] = {pts[0][0] + 1.0, pts[0][1], pts[0][2]};
        }
        const KdTree tree(pts, 4);
        for (double r : {0.0, 0.5, 1.0, 2.5, 20.0}) {
            for (std::size_t q = 0; q < std::min<std::size_t>(n, 200); ++q) {
                EXPECT_EQ(tree.radius_query(pts[q], r), brute(pts, pts[q], r));
                EXPECT_EQ(tree.radius_count(pts[q], r), brute(pts, pts[q], r).size());
            }
            const Point3 off{0.3, -0.2, 0.1};
            EXPECT_EQ(tree.radius_query(off, r), brute(pts, off, r));
        }
    }
}

TEST(KdTree, Empty)
{
    const KdTree tree({});
    EXPECT_EQ(tree.size(), 0u);
    EXPECT_TRUE(tree.radius_query({0, 0, 0}, 10.0).empty());
}

TEST(KdTree, AllCoincident)
{
    std::vector<Point3> pts(50, Point3{1, 1, 1});
    const KdTree tree(pts);
    EXPECT_EQ(tree.radius_count({1, 1, 1}, 0.0), 50u);
    EXPECT_EQ(tree.radius_count({1, 1, 2.5}, 1.0), 0u);
}
