#pragma once

#include "sphlab/kernel.hpp"
#include "sphlab/octree.hpp"
#include "sphlab/particle_model.hpp"
#include "sphlab/scheduler.hpp"
#include "sphlab/selection.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sphlab {

enum class LoopStyle { branchy, branch_lowered };

inline constexpr std::size_t default_k_neighbors = 295;
inline constexpr int default_max_iterations = 100;

struct VariantConfig
{
    SchedulerKind scheduler_kind = SchedulerKind::dynamic_for;
    LayoutKind layout_kind = LayoutKind::soa;
    LoopStyle loop_style = LoopStyle::branch_lowered;
    SelectorKind selector_kind = SelectorKind::quick_select;
    std::size_t k_neighbors = default_k_neighbors;
    std::size_t chunk_size = default_chunk_size;
    std::size_t leaf_capacity = Octree::default_leaf_capacity;
    int max_iterations = default_max_iterations;
};

/// The optimisation ladder, each step keeping every change of the previous one.
inline constexpr std::array<std::string_view, 6> preset_names = {"original", "todo-list",  "lockless",
                                                                 "soa",      "vectorised", "optimised"};

inline VariantConfig preset(std::string_view name, std::size_t k_neighbors = default_k_neighbors)
{
    using enum SchedulerKind;
    VariantConfig c;
    c.k_neighbors = k_neighbors;
    const auto set = [&c](SchedulerKind s, LayoutKind l, LoopStyle loop, SelectorKind sel) {
        c.scheduler_kind = s;
        c.layout_kind = l;
        c.loop_style = loop;
        c.selector_kind = sel;
    };
    if (name == "original")
        set(locked_queue, LayoutKind::aos, LoopStyle::branchy, SelectorKind::full_sort);
    else if (name == "todo-list")
        set(todo_list, LayoutKind::aos, LoopStyle::branchy, SelectorKind::full_sort);
    else if (name == "lockless")
        set(dynamic_for, LayoutKind::aos, LoopStyle::branchy, SelectorKind::full_sort);
    else if (name == "soa")
        set(dynamic_for, LayoutKind::soa, LoopStyle::branchy, SelectorKind::full_sort);
    else if (name == "vectorised")
        set(dynamic_for, LayoutKind::soa, LoopStyle::branch_lowered, SelectorKind::full_sort);
    else if (name == "optimised")
        set(dynamic_for, LayoutKind::soa, LoopStyle::branch_lowered, SelectorKind::quick_select);
    else
        throw std::invalid_argument("unknown variant preset '" + std::string(name) + "'");
    return c;
}

/// Seconds, summed over iterations. Search/select/interact are also summed
/// over workers; tree_build and layout are wall time.
struct PhaseTimes
{
    double tree_build = 0.0;
    double search = 0.0;
    double select = 0.0;
    double interact = 0.0;
    double layout = 0.0;
};

struct PassStats
{
    std::size_t iteration_count = 0;
    // One entry per outer iteration, followed by the terminating zero.
    std::vector<std::size_t> todo_sizes;
    PhaseTimes phase_times;
    double contention_time = 0.0;
    double total_time = 0.0;
    // Indexed [iteration][worker].
    std::vector<std::vector<std::size_t>> items_per_worker;
    std::size_t skipped_items = 0;
    std::size_t selections = 0;
    // Sum of candidate-list lengths over all selections.
    std::size_t candidates_selected_from = 0;
};

struct PassResult
{
    std::vector<double> densities;
    PassStats stats;
};

class PassError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public PassError
{
public:
    NonConvergenceError(std::size_t surviving, int iterations)
        : PassError("density pass did not converge after " + std::to_string(iterations) + " iterations: " +
                    std::to_string(surviving) + " particles still lack enough neighbours"),
          surviving_(surviving)
    {}

    std::size_t surviving() const noexcept { return surviving_; }

private:
    std::size_t surviving_;
};

/// Radius that encloses k particles on average in a uniform box of side L holding n.
inline double initial_smoothing_length(double box_side, std::size_t n, std::size_t k)
{
    return box_side * std::cbrt(3.0 * static_cast<double>(k) / (4.0 * std::numbers::pi * static_cast<double>(n)));
}

/// Doubles the search volume.
inline const double smoothing_growth = std::cbrt(2.0);

struct SmoothingUpdate
{
    double smoothing_length;
    bool needs_recompute;
};

/// Too few neighbours: grow h and retry. Otherwise h becomes the distance to
/// the k-th nearest candidate.
inline SmoothingUpdate adjust_smoothing_length(double h, std::size_t found_count, std::size_t k, double kth_dist2)
{
    if (found_count < k)
        return {h * smoothing_growth, true};
    return {std::sqrt(kth_dist2), false};
}

/// rho = sum_j m_j W(r_ij, h) over `neighbors`, accumulated in list order.
template<typename View>
double density_interact(const View& data, std::span<const NeighborCandidate> neighbors, double h, LoopStyle style)
{
    const double inv_h = 1.0 / h;
    double rho = 0.0;
    if (style == LoopStyle::branchy) {
        for (const NeighborCandidate& n : neighbors) {
            const double r = std::sqrt(n.dist2);
            if (r < h) {
                const double w = WendlandC6::weight_in_support(r, inv_h);
                rho += data.mass(n.index) * w;
            }
        }
    } else {
        for (const NeighborCandidate& n : neighbors) {
            const double r = std::sqrt(n.dist2);
            const double w = WendlandC6::weight_lowered(r, h, inv_h);
            rho += data.mass(n.index) * w;
        }
    }
    return rho;
}

namespace detail {

struct alignas(64) PassScratch
{
    std::vector<NeighborCandidate> candidates;
    std::vector<std::uint32_t> flagged;
    double search = 0.0;
    double select = 0.0;
    double interact = 0.0;
    std::size_t selections = 0;
    std::size_t candidates_total = 0;
};

template<typename View>
void run_density_iterations(View view, const VariantConfig& config, unsigned threads, PassStats& stats)
{
    const std::size_t n = view.size();
    const std::size_t k = config.k_neighbors;
    const auto position = [&view](std::size_t i) { return view.position(i); };

    auto t0 = clock::now();
    const Octree tree = Octree::build(n, position, config.leaf_capacity);
    stats.phase_times.tree_build += seconds_between(t0, clock::now());

    std::vector<std::uint32_t> all_items(n);
    std::iota(all_items.begin(), all_items.end(), 0u);
    std::vector<std::uint32_t> todo = all_items;
    std::vector<PassScratch> scratch(threads);

    const auto work = [&](std::uint32_t i, unsigned w) -> bool {
        PassScratch& sc = scratch[w];
        const double h = view.smoothing_length(i);

        const auto t_search = clock::now();
        tree.range_query(position, view.position(i), h, sc.candidates, i);
        const auto t_selected_from = clock::now();
        sc.search += seconds_between(t_search, t_selected_from);

        const std::size_t found = sc.candidates.size();
        if (found < k) {
            const SmoothingUpdate up = adjust_smoothing_length(h, found, k, 0.0);
            view.set_smoothing_length(i, up.smoothing_length);
            view.set_needs_recompute(i, true);
            sc.flagged.push_back(i);
            return std::isfinite(up.smoothing_length);
        }

        select_nearest(sc.candidates, k, config.selector_kind);
        const auto t_interact = clock::now();
        sc.select += seconds_between(t_selected_from, t_interact);

        const SmoothingUpdate up = adjust_smoothing_length(h, found, k, sc.candidates[k - 1].dist2);
        const double rho = density_interact(view, std::span(sc.candidates).first(k), up.smoothing_length,
                                            config.loop_style);
        sc.interact += seconds_between(t_interact, clock::now());

        view.set_density(i, rho);
        view.set_smoothing_length(i, up.smoothing_length);
        view.set_needs_recompute(i, false);
        ++sc.selections;
        sc.candidates_total += found;
        return std::isfinite(rho);
    };

    int iteration = 0;
    while (!todo.empty()) {
        if (iteration >= config.max_iterations)
            throw NonConvergenceError(todo.size(), iteration);
        stats.todo_sizes.push_back(todo.size());

        ScheduleStats s;
        switch (config.scheduler_kind) {
        case SchedulerKind::locked_queue:
            s = run_locked_queue(
                all_items, [&view](std::uint32_t i) { return view.needs_recompute(i); }, work, threads);
            break;
        case SchedulerKind::todo_list:
            s = run_todo_list(todo, work, threads);
            break;
        case SchedulerKind::dynamic_for:
            s = run_dynamic_for(todo, work, threads, config.chunk_size);
            break;
        }
        stats.contention_time += s.contention_time;
        stats.skipped_items += s.skipped_items;
        stats.items_per_worker.push_back(std::move(s.items_per_worker));
        if (s.error)
            throw PassError("a worker reported a non-finite smoothing length or density in iteration " +
                            std::to_string(iteration));

        todo.clear();
        for (PassScratch& sc : scratch) {
            todo.insert(todo.end(), sc.flagged.begin(), sc.flagged.end());
            sc.flagged.clear();
        }
        std::sort(todo.begin(), todo.end());
        ++iteration;
    }
    stats.todo_sizes.push_back(0);
    stats.iteration_count = static_cast<std::size_t>(iteration);

    for (const PassScratch& sc : scratch) {
        stats.phase_times.search += sc.search;
        stats.phase_times.select += sc.select;
        stats.phase_times.interact += sc.interact;
        stats.selections += sc.selections;
        stats.candidates_selected_from += sc.candidates_total;
    }
}

}  // namespace detail

/// Computes every particle's density from exactly its k nearest neighbours
/// (self excluded), repeating over the particles whose search radius held too
/// few candidates until none remain. The AoS collection stays authoritative:
/// density, smoothing_length and needs_recompute are updated in place.
inline PassResult compute_density_pass(ParticleAoS& particles, const VariantConfig& config, unsigned thread_count)
{
    if (particles.empty())
        throw PassError("density pass needs a non-empty workload");
    if (thread_count < 1)
        throw PassError("thread_count must be >= 1");
    if (config.k_neighbors < 1)
        throw PassError("k_neighbors must be >= 1");

    PassResult result;
    PassStats& stats = result.stats;
    const auto start = detail::clock::now();

    for (std::size_t i = 0; i < particles.size(); ++i)
        particles[i].needs_recompute = true;

    if (config.layout_kind == LayoutKind::soa) {
        auto t = detail::clock::now();
        ParticleSoA soa = gather_to_soa(particles, thread_count);
        stats.phase_times.layout += detail::seconds_between(t, detail::clock::now());

        detail::run_density_iterations(SoaView(soa), config, thread_count, stats);

        t = detail::clock::now();
        scatter_from_soa(soa, particles, default_writeback, thread_count);
        stats.phase_times.layout += detail::seconds_between(t, detail::clock::now());
    } else {
        detail::run_density_iterations(AosView(particles), config, thread_count, stats);
    }

    result.densities.resize(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i)
        result.densities[i] = particles[i].density;
    stats.total_time = detail::seconds_between(start, detail::clock::now());
    return result;
}

}  // namespace sphlab
