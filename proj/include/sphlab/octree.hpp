#pragma once

#include "sphlab/selection.hpp"
#include "sphlab/vec3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphlab {

class OctreeError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct TreeNode
{
    static constexpr std::uint32_t no_children = std::numeric_limits<std::uint32_t>::max();

    Vec3 center;
    double half_extent = 0.0;
    // Index of the first of eight consecutive children, or no_children for a leaf.
    std::uint32_t child_base = no_children;
    // Range into Octree::particle_perm. Internal nodes keep the range covering
    // their whole subtree.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    bool is_leaf() const noexcept { return child_base == no_children; }
};

struct TreeReport
{
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Octal tree over particle positions stored as a flat node array. Particles
/// are referenced only through their index in the caller's particle array;
/// positions are read back through an accessor so that the same tree serves
/// either data layout.
class Octree
{
public:
    static constexpr std::size_t default_leaf_capacity = 8;
    static constexpr int max_depth = 64;

    std::vector<TreeNode> nodes;
    std::vector<std::uint32_t> particle_perm;
    std::size_t leaf_capacity = default_leaf_capacity;

    const TreeNode& root() const { return nodes.front(); }

    /// `position(i)` must return a Vec3 for every i in [0, n).
    template<typename PositionFn>
    static Octree build(std::size_t n, PositionFn&& position, std::size_t leaf_capacity = default_leaf_capacity)
    {
        if (leaf_capacity < 1)
            throw OctreeError("leaf_capacity must be >= 1");
        if (n >= std::numeric_limits<std::uint32_t>::max())
            throw OctreeError("too many particles for 32-bit indices");

        Octree tree;
        tree.leaf_capacity = leaf_capacity;
        tree.particle_perm.resize(n);
        std::iota(tree.particle_perm.begin(), tree.particle_perm.end(), 0u);

        Vec3 lo{0, 0, 0};
        Vec3 hi{0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 p = position(i);
            if (!is_finite(p))
                throw OctreeError("non-finite coordinate for particle " + std::to_string(i));
            if (i == 0) {
                lo = hi = p;
                continue;
            }
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        TreeNode root;
        root.center = {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y), 0.5 * (lo.z + hi.z)};
        const double half = 0.5 * std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
        // Slight inflation so that the extreme particles sit strictly inside.
        root.half_extent = half * (1.0 + 1e-12) + std::numeric_limits<double>::min();
        root.begin = 0;
        root.end = static_cast<std::uint32_t>(n);
        tree.nodes.push_back(root);

        struct Pending
        {
            std::uint32_t node;
            int depth;
        };
        std::vector<Pending> stack{{0, 0}};
        std::vector<std::uint32_t> scratch;
        std::vector<std::uint8_t> octant;

        while (!stack.empty()) {
            const Pending item = stack.back();
            stack.pop_back();
            const TreeNode node = tree.nodes[item.node];
            const std::size_t count = node.end - node.begin;
            if (count <= leaf_capacity || item.depth >= max_depth)
                continue;

            // Coincident particles cannot be separated by splitting.
            const Vec3 first = position(tree.particle_perm[node.begin]);
            bool coincident = true;
            for (std::uint32_t k = node.begin + 1; k < node.end && coincident; ++k)
                coincident = position(tree.particle_perm[k]) == first;
            if (coincident)
                continue;

            // Stable counting sort of the node's range by octant (x bit, then y, then z).
            std::array<std::uint32_t, 9> offsets{};
            octant.resize(count);
            for (std::size_t k = 0; k < count; ++k) {
                const Vec3 p = position(tree.particle_perm[node.begin + k]);
                const auto o = static_cast<std::uint8_t>((p.x >= node.center.x ? 4 : 0) |
                                                         (p.y >= node.center.y ? 2 : 0) |
                                                         (p.z >= node.center.z ? 1 : 0));
                octant[k] = o;
                ++offsets[o + 1];
            }
            for (int o = 0; o < 8; ++o)
                offsets[o + 1] += offsets[o];
            scratch.resize(count);
            std::array<std::uint32_t, 8> cursor;
            std::copy_n(offsets.begin(), 8, cursor.begin());
            for (std::size_t k = 0; k < count; ++k)
                scratch[cursor[octant[k]]++] = tree.particle_perm[node.begin + k];
            std::copy(scratch.begin(), scratch.end(), tree.particle_perm.begin() + node.begin);

            const auto base = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes[item.node].child_base = base;
            const double child_half = 0.5 * node.half_extent;
            for (int o = 0; o < 8; ++o) {
                TreeNode child;
                child.center = {node.center.x + ((o & 4) ? child_half : -child_half),
                                node.center.y + ((o & 2) ? child_half : -child_half),
                                node.center.z + ((o & 1) ? child_half : -child_half)};
                child.half_extent = child_half;
                child.begin = node.begin + offsets[o];
                child.end = node.begin + offsets[o + 1];
                tree.nodes.push_back(child);
            }
            // Reverse push keeps processing order deterministic and octant-ordered.
            for (int o = 7; o >= 0; --o)
                stack.push_back({base + static_cast<std::uint32_t>(o), item.depth + 1});
        }
        return tree;
    }

    static Octree build(std::span<const Vec3> positions, std::size_t leaf_capacity = default_leaf_capacity)
    {
        return build(positions.size(), [positions](std::size_t i) { return positions[i]; }, leaf_capacity);
    }

    /// Appends every particle with |r - center| <= radius to `out` (cleared
    /// first), skipping `exclude`. Iterative traversal with a fixed-size stack:
    /// no allocation beyond growth of `out`.
    template<typename PositionFn>
        requires std::invocable<const PositionFn&, std::uint32_t>
    void range_query(PositionFn&& position, const Vec3& center, double radius, std::vector<NeighborCandidate>& out,
                     std::uint32_t exclude = std::numeric_limits<std::uint32_t>::max()) const
    {
        out.clear();
        if (nodes.empty() || radius < 0.0)
            return;
        const double r2 = radius * radius;

        // Depth is bounded by max_depth and each level leaves at most 7 siblings pending.
        std::array<std::uint32_t, 8 * (max_depth + 1)> stack;
        std::size_t top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const TreeNode& node = nodes[stack[--top]];
            if (node.begin == node.end || cube_sphere_distance2(node, center) > r2)
                continue;
            if (!node.is_leaf()) {
                for (std::uint32_t c = 0; c < 8; ++c)
                    stack[top++] = node.child_base + c;
                continue;
            }
            for (std::uint32_t k = node.begin; k < node.end; ++k) {
                const std::uint32_t idx = particle_perm[k];
                if (idx == exclude)
                    continue;
                const double d2 = distance2(position(idx), center);
                if (d2 <= r2)
                    out.push_back({idx, d2});
            }
        }
    }

    void range_query(std::span<const Vec3> positions, const Vec3& center, double radius,
                     std::vector<NeighborCandidate>& out,
                     std::uint32_t exclude = std::numeric_limits<std::uint32_t>::max()) const
    {
        range_query([positions](std::size_t i) { return positions[i]; }, center, radius, out, exclude);
    }

    /// Squared distance from `p` to the node's cube (zero inside).
    static double cube_sphere_distance2(const TreeNode& node, const Vec3& p) noexcept
    {
        const auto axis = [&](double c, double v) {
            const double d = std::abs(v - c) - node.half_extent;
            return d > 0.0 ? d * d : 0.0;
        };
        return axis(node.center.x, p.x) + axis(node.center.y, p.y) + axis(node.center.z, p.z);
    }
};

/// Checks containment, partition and permutation invariants. Reports every
/// violation found, the first one first.
template<typename PositionFn>
TreeReport validate_tree(const Octree& tree, std::size_t n, PositionFn&& position)
{
    TreeReport report;
    auto fail = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

    if (tree.particle_perm.size() != n)
        fail("permutation has " + std::to_string(tree.particle_perm.size()) + " entries, expected " +
             std::to_string(n));
    std::vector<int> seen_perm(n, 0);
    for (std::uint32_t idx : tree.particle_perm) {
        if (idx >= n)
            fail("permutation entry " + std::to_string(idx) + " out of range");
        else if (++seen_perm[idx] == 2)
            fail("permutation repeats index " + std::to_string(idx));
    }
    if (tree.nodes.empty()) {
        if (n > 0)
            fail("tree has no root");
        return report;
    }

    const double tol = 1e-9 * std::max(tree.root().half_extent, 1e-300);
    auto inside = [tol](const TreeNode& node, const Vec3& p) {
        return std::abs(p.x - node.center.x) <= node.half_extent + tol &&
               std::abs(p.y - node.center.y) <= node.half_extent + tol &&
               std::abs(p.z - node.center.z) <= node.half_extent + tol;
    };

    for (std::size_t i = 0; i < n; ++i)
        if (!inside(tree.root(), position(i)))
            fail("root cube does not contain particle " + std::to_string(i));

    std::vector<int> seen_leaf(n, 0);
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const std::uint32_t id = stack.back();
        stack.pop_back();
        const TreeNode& node = tree.nodes[id];
        if (node.begin > node.end || node.end > tree.particle_perm.size()) {
            fail("node " + std::to_string(id) + " has an invalid particle range");
            continue;
        }
        if (node.is_leaf()) {
            for (std::uint32_t k = node.begin; k < node.end; ++k) {
                const std::uint32_t idx = tree.particle_perm[k];
                if (idx >= n)
                    continue;
                if (++seen_leaf[idx] == 2)
                    fail("particle " + std::to_string(idx) + " appears in more than one leaf");
                if (!inside(node, position(idx)))
                    fail("leaf " + std::to_string(id) + " does not contain particle " + std::to_string(idx));
            }
            continue;
        }
        if (node.child_base + 8 > tree.nodes.size()) {
            fail("node " + std::to_string(id) + " has children beyond the node array");
            continue;
        }
        for (std::uint32_t c = 0; c < 8; ++c) {
            const TreeNode& child = tree.nodes[node.child_base + c];
            const double reach = child.half_extent;
            const bool contained =
                std::abs(child.center.x - node.center.x) + reach <= node.half_extent + tol &&
                std::abs(child.center.y - node.center.y) + reach <= node.half_extent + tol &&
                std::abs(child.center.z - node.center.z) + reach <= node.half_extent + tol;
            if (!contained)
                fail("child " + std::to_string(node.child_base + c) + " escapes parent " + std::to_string(id));
            stack.push_back(node.child_base + c);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (seen_leaf[i] == 0)
            fail("particle " + std::to_string(i) + " is in no leaf");
    return report;
}

inline TreeReport validate_tree(const Octree& tree, std::span<const Vec3> positions)
{
    return validate_tree(tree, positions.size(), [positions](std::size_t i) { return positions[i]; });
}

}  // namespace sphlab
