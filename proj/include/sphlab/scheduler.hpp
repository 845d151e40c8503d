#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sphlab {

enum class SchedulerKind { locked_queue, todo_list, dynamic_for };

inline constexpr std::size_t default_chunk_size = 16;

struct ScheduleStats
{
    // Seconds spent between requesting and obtaining a queue position, summed over workers.
    double contention_time = 0.0;
    std::vector<std::size_t> items_per_worker;
    // Popped but not requiring computation (locked queue only).
    std::size_t skipped_items = 0;
    // Some work item raised the error flag.
    bool error = false;

    std::size_t processed() const noexcept
    {
        return std::accumulate(items_per_worker.begin(), items_per_worker.end(), std::size_t{0});
    }
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double seconds_between(clock::time_point a, clock::time_point b) noexcept
{
    return std::chrono::duration<double>(b - a).count();
}

struct alignas(64) WorkerTally
{
    double contention = 0.0;
    std::size_t processed = 0;
    std::size_t skipped = 0;
};

// Runs body(worker_id) on `workers` threads; the caller is worker 0.
template<typename Body>
void run_workers(unsigned workers, Body&& body)
{
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back([&body, w] { body(w); });
    body(0u);
}

inline ScheduleStats collect(const std::vector<WorkerTally>& tallies, bool error)
{
    ScheduleStats stats;
    stats.error = error;
    for (const auto& t : tallies) {
        stats.contention_time += t.contention;
        stats.items_per_worker.push_back(t.processed);
        stats.skipped_items += t.skipped;
    }
    return stats;
}

inline void check_workers(unsigned workers)
{
    if (workers < 1)
        throw std::invalid_argument("scheduler needs at least one worker");
}

// Shared queue guarded by a mutex: every pop enters the critical section, and
// the must_compute test happens only after the item has been taken.
template<typename MustCompute, typename Work>
ScheduleStats run_shared_queue(std::span<const std::uint32_t> items, MustCompute&& must_compute, Work&& work,
                               unsigned workers)
{
    check_workers(workers);
    std::mutex queue_lock;
    std::size_t next = 0;
    std::atomic<bool> error{false};
    std::vector<WorkerTally> tallies(workers);

    run_workers(workers, [&](unsigned w) {
        WorkerTally& tally = tallies[w];
        for (;;) {
            std::uint32_t item;
            const auto requested = clock::now();
            {
                std::lock_guard guard(queue_lock);
                tally.contention += seconds_between(requested, clock::now());
                if (error.load(std::memory_order_relaxed) || next >= items.size())
                    break;
                item = items[next++];
            }
            if (!must_compute(item)) {
                ++tally.skipped;
                continue;
            }
            if (!work(item, w))
                error.store(true, std::memory_order_relaxed);
            ++tally.processed;
        }
    });
    return collect(tallies, error.load());
}

}  // namespace detail

/// Pops every index of the full particle list under a lock and tests
/// must_compute afterwards. Kept deliberately inefficient: this is the
/// baseline the other engines are measured against.
template<typename MustCompute, typename Work>
ScheduleStats run_locked_queue(std::span<const std::uint32_t> items, MustCompute&& must_compute, Work&& work,
                               unsigned workers)
{
    return detail::run_shared_queue(items, must_compute, work, workers);
}

/// Same locked queue, but over a pre-filtered list of items that all need work.
template<typename Work>
ScheduleStats run_todo_list(std::span<const std::uint32_t> items, Work&& work, unsigned workers)
{
    return detail::run_shared_queue(items, [](std::uint32_t) { return true; }, work, workers);
}

/// Chunks claimed through one shared atomic cursor. Errors only set a flag;
/// the loop runs to completion and the flag is reported afterwards.
template<typename Work>
ScheduleStats run_dynamic_for(std::span<const std::uint32_t> items, Work&& work, unsigned workers,
                              std::size_t chunk_size = default_chunk_size)
{
    detail::check_workers(workers);
    if (chunk_size < 1)
        throw std::invalid_argument("chunk_size must be >= 1");
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> error{false};
    std::vector<detail::WorkerTally> tallies(workers);

    detail::run_workers(workers, [&](unsigned w) {
        detail::WorkerTally& tally = tallies[w];
        for (;;) {
            const auto requested = detail::clock::now();
            const std::size_t begin = cursor.fetch_add(chunk_size, std::memory_order_relaxed);
            tally.contention += detail::seconds_between(requested, detail::clock::now());
            if (begin >= items.size())
                break;
            const std::size_t end = std::min(items.size(), begin + chunk_size);
            for (std::size_t k = begin; k < end; ++k) {
                if (!work(items[k], w))
                    error.store(true, std::memory_order_relaxed);
                ++tally.processed;
            }
        }
    });
    return detail::collect(tallies, error.load());
}

}  // namespace sphlab
