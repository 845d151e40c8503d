#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace sphlab {

struct NeighborCandidate
{
    std::uint32_t index = 0;
    double dist2 = 0.0;

    friend constexpr bool operator==(const NeighborCandidate&, const NeighborCandidate&) = default;
};

/// Total order on candidates: squared distance, ties broken by particle index.
constexpr bool closer(const NeighborCandidate& a, const NeighborCandidate& b) noexcept
{
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

enum class SelectorKind { full_sort, quick_select };

class SelectionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_k(std::size_t k, std::size_t n)
{
    if (k > n)
        throw SelectionError("cannot select " + std::to_string(k) + " neighbours from " + std::to_string(n) +
                             " candidates");
}

}  // namespace detail

/// Sorts the whole list; the first k entries are then the k nearest.
inline void select_k_fullsort(std::span<NeighborCandidate> candidates, std::size_t k)
{
    detail::check_k(k, candidates.size());
    std::sort(candidates.begin(), candidates.end(), closer);
}

/// Partially orders the list so that position k-1 holds the k-th nearest
/// candidate, everything before it is no farther and everything after it is
/// no nearer. Median-of-three pivot, Hoare partitioning, iterating only into
/// the side that contains position k-1.
inline void select_k_quickselect(std::span<NeighborCandidate> candidates, std::size_t k)
{
    detail::check_k(k, candidates.size());
    if (k == 0 || candidates.size() < 2)
        return;

    auto* a = candidates.data();
    const std::ptrdiff_t target = static_cast<std::ptrdiff_t>(k) - 1;
    std::ptrdiff_t lo = 0;
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(candidates.size()) - 1;

    while (lo < hi) {
        const std::ptrdiff_t mid = lo + (hi - lo) / 2;
        if (closer(a[mid], a[lo]))
            std::swap(a[mid], a[lo]);
        if (closer(a[hi], a[lo]))
            std::swap(a[hi], a[lo]);
        if (closer(a[hi], a[mid]))
            std::swap(a[hi], a[mid]);
        const NeighborCandidate pivot = a[mid];

        std::ptrdiff_t i = lo;
        std::ptrdiff_t j = hi;
        while (i <= j) {
            while (closer(a[i], pivot))
                ++i;
            while (closer(pivot, a[j]))
                --j;
            if (i <= j) {
                std::swap(a[i], a[j]);
                ++i;
                --j;
            }
        }
        // [lo, j] <= pivot, [i, hi] >= pivot, anything strictly between equals pivot.
        if (target <= j)
            hi = j;
        else if (target >= i)
            lo = i;
        else
            break;
    }
}

/// Brings the k nearest candidates to the front in canonical (dist2, index)
/// order, which is the order the density sum consumes them in.
inline void select_nearest(std::span<NeighborCandidate> candidates, std::size_t k, SelectorKind kind)
{
    if (kind == SelectorKind::full_sort) {
        select_k_fullsort(candidates, k);
        return;
    }
    select_k_quickselect(candidates, k);
    std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), closer);
}

}  // namespace sphlab
