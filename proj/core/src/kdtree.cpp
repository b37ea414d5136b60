#include "uatpc/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace uatpc {

KdTree::KdTree(std::vector<Point3> points, std::size_t leaf_size)
    : points_(std::move(points)), index_(points_.size()), leaf_size_(std::max<std::size_t>(leaf_size, 1))
{
    std::iota(index_.begin(), index_.end(), 0);
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
        build(0, points_.size());
    }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end)
{
    const std::size_t id = nodes_.size();
    nodes_.push_back({});
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= leaf_size_) {
        return id;
    }

    // Split on the axis of largest spread.
    Point3 lo = points_[index_[begin]];
    Point3 hi = lo;
    for (std::size_t k = begin; k < end; ++k) {
        const auto& p = points_[index_[k]];
        for (int d = 0; d < 3; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    }
    int axis = 0;
    for (int d = 1; d < 3; ++d) {
        if (hi[d] - lo[d] > hi[axis] - lo[axis]) {
            axis = d;
        }
    }
    if (hi[axis] == lo[axis]) {
        return id; // all points coincide
    }

    const std::size_t mid = begin + (end - begin) / 2;
    auto first = index_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[index_[mid]][axis];

    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    auto& node = nodes_[id];
    node.leaf = false;
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

std::vector<std::size_t> KdTree::radius_query(const Point3& center, double radius) const
{
    std::vector<std::size_t> out;
    for_each_in_radius(center, radius, [&](std::size_t i) { out.push_back(i); });
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t KdTree::radius_count(const Point3& center, double radius) const
{
    std::size_t count = 0;
    for_each_in_radius(center, radius, [&](std::size_t) { ++count; });
    return count;
}

} // namespace uatpc
