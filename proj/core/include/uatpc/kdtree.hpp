#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace uatpc {

using Point3 = std::array<double, 3>;

/// Static 3-D k-d tree built by median splits, with exact radius queries.
class KdTree {
public:
    explicit KdTree(std::vector<Point3> points, std::size_t leaf_size = 8);

    std::size_t size() const noexcept { return points_.size(); }
    const Point3& point(std::size_t i) const { return points_[i]; }

    /// Indices of all points p with |p - center| <= radius, in ascending order.
    std::vector<std::size_t> radius_query(const Point3& center, double radius) const;

    /// Same as radius_query without materializing the result.
    std::size_t radius_count(const Point3& center, double radius) const;

    template <typename Visit>
    void for_each_in_radius(const Point3& center, double radius, Visit&& visit) const
    {
        if (nodes_.empty()) {
            return;
        }
        const double r2 = radius * radius;
        std::vector<std::size_t> stack{0};
        while (!stack.empty()) {
            const auto& node = nodes_[stack.back()];
            stack.pop_back();
            if (node.leaf) {
                for (std::size_t k = node.begin; k < node.end; ++k) {
                    const auto idx = index_[k];
                    if (squared_distance(points_[idx], center) <= r2) {
                        visit(idx);
                    }
                }
                continue;
            }
            const double diff = center[node.axis] - node.split;
            if (diff - radius <= 0.0) {
                stack.push_back(node.left);
            }
            if (diff + radius >= 0.0) {
                stack.push_back(node.right);
            }
        }
    }

    static double squared_distance(const Point3& a, const Point3& b) noexcept
    {
        const double dx = a[0] - b[0];
        const double dy = a[1] - b[1];
        const double dz = a[2] - b[2];
        return dx * dx + dy * dy + dz * dz;
    }

private:
    struct Node {
        bool leaf = true;
        int axis = 0;
        double split = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        std::size_t begin = 0;
        std::size_t end = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);

    std::vector<Point3> points_;
    std::vector<std::size_t> index_;
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
};

} // namespace uatpc
