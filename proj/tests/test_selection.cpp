#include "sphlab/selection.hpp"
#include "sphlab/workload.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <ranges>
#include <tuple>
#include <vector>

using namespace sphlab;

namespace {

std::vector<NeighborCandidate> random_list(SplitMix64& rng, std::size_t n, bool with_ties)
{
    std::vector<NeighborCandidate> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i].index = static_cast<std::uint32_t>(rng.next() % 100000);
        // Coarse distances force many (dist2) ties that only the index separates.
        v[i].dist2 = with_ties ? static_cast<double>(rng.next() % 16) : rng.next_double() * 4.0;
    }
    return v;
}

// Independent of `closer`: lexicographic tuple order.
std::vector<NeighborCandidate> reference_sorted(std::vector<NeighborCandidate> v)
{
    std::ranges::sort(v, {}, [](const NeighborCandidate& c) { return std::tuple(c.dist2, c.index); });
    return v;
}

std::vector<NeighborCandidate> sorted_prefix(const std::vector<NeighborCandidate>& v, std::size_t k)
{
    return reference_sorted({v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k)});
}

}  // namespace

TEST(Selection, FullSortSmallExample)
{
    std::vector<NeighborCandidate> v{{0, 4}, {1, 1}, {2, 9}};
    select_k_fullsort(v, 2);
    EXPECT_EQ(v, (std::vector<NeighborCandidate>{{1, 1}, {0, 4}, {2, 9}}));
}

TEST(Selection, FullSortIdempotentOnSortedInput)
{
    std::vector<NeighborCandidate> v{{3, 0.5}, {1, 1}, {2, 1}, {0, 7}};
    const auto before = v;
    select_k_fullsort(v, 4);
    EXPECT_EQ(v, before);
}

TEST(Selection, FullSortMatchesReferenceSort)
{
    SplitMix64 rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        auto v = random_list(rng, 1 + rng.next() % 400, trial % 2 == 0);
        const auto expect = reference_sorted(v);
        select_k_fullsort(v, v.size() / 2);
        ASSERT_EQ(v, expect) << "trial " << trial;
    }
}

TEST(Selection, QuickSelectSmallExample)
{
    // a=0 .. e=4
    std::vector<NeighborCandidate> v{{0, 5}, {1, 1}, {2, 4}, {3, 2}, {4, 3}};
    select_k_quickselect(v, 2);
    EXPECT_EQ(sorted_prefix(v, 2), (std::vector<NeighborCandidate>{{1, 1}, {3, 2}}));
}

TEST(Selection, QuickSelectWholeList)
{
    SplitMix64 rng(2);
    auto v = random_list(rng, 57, false);
    const auto expect = reference_sorted(v);
    select_k_quickselect(v, v.size());
    EXPECT_EQ(reference_sorted(v), expect);
}

TEST(Selection, QuickSelectAgreesWithFullSortAndPartitions)
{
    SplitMix64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 500 + rng.next() % 501;
        const auto original = random_list(rng, n, trial % 3 == 0);
        const auto full = reference_sorted(original);
        for (std::size_t k : {std::size_t{1}, std::size_t{295}, n, 1 + rng.next() % n}) {
            auto v = original;
            select_k_quickselect(v, k);
            ASSERT_EQ(sorted_prefix(v, k), std::vector<NeighborCandidate>(full.begin(), full.begin() + k))
                << "trial " << trial << " k " << k;
            const NeighborCandidate pivot = v[k - 1];
            for (std::size_t i = 0; i < k; ++i)
                ASSERT_FALSE(closer(pivot, v[i]));
            for (std::size_t i = k; i < n; ++i)
                ASSERT_FALSE(closer(v[i], pivot));
        }
    }
}

TEST(Selection, QuickSelectAdversarialOrders)
{
    for (int pattern = 0; pattern < 3; ++pattern) {
        std::vector<NeighborCandidate> v(2000);
        for (std::uint32_t i = 0; i < v.size(); ++i) {
            const double d = pattern == 0 ? i : pattern == 1 ? 2000.0 - i : 1.0;
            v[i] = {i, d};
        }
        const auto full = reference_sorted(v);
        select_k_quickselect(v, 700);
        EXPECT_EQ(sorted_prefix(v, 700), std::vector<NeighborCandidate>(full.begin(), full.begin() + 700));
    }
}

TEST(Selection, SelectNearestGivesCanonicalPrefix)
{
    SplitMix64 rng(4);
    auto a = random_list(rng, 800, true);
    auto b = a;
    select_nearest(a, 295, SelectorKind::full_sort);
    select_nearest(b, 295, SelectorKind::quick_select);
    EXPECT_TRUE(std::equal(a.begin(), a.begin() + 295, b.begin()));
}

TEST(Selection, TooFewCandidatesIsAnError)
{
    std::vector<NeighborCandidate> v{{0, 1}, {1, 2}};
    EXPECT_THROW(select_k_fullsort(v, 3), SelectionError);
    EXPECT_THROW(select_k_quickselect(v, 3), SelectionError);
}
