#pragma once

#include "sphlab/density.hpp"
#include "sphlab/particle_model.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sphlab {

/// splitmix64. Pure integer arithmetic, so streams are bit-exact on every platform.
class SplitMix64
{
public:
    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept
    {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double next_double() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

struct PrngStep
{
    std::uint64_t value;
    std::uint64_t state;
};

constexpr PrngStep prng_next(std::uint64_t state) noexcept
{
    SplitMix64 g(state);
    const std::uint64_t v = g.next();
    return {v, g.state()};
}

enum class WorkloadKind { uniform_box, gaussian_blobs, lattice };

inline std::string_view to_string(WorkloadKind k)
{
    switch (k) {
    case WorkloadKind::uniform_box: return "uniform";
    case WorkloadKind::gaussian_blobs: return "blobs";
    case WorkloadKind::lattice: return "lattice";
    }
    return "?";
}

inline WorkloadKind parse_workload_kind(std::string_view s)
{
    if (s == "uniform")
        return WorkloadKind::uniform_box;
    if (s == "blobs")
        return WorkloadKind::gaussian_blobs;
    if (s == "lattice")
        return WorkloadKind::lattice;
    throw std::invalid_argument("unknown workload kind '" + std::string(s) + "' (uniform, blobs, lattice)");
}

struct WorkloadSpec
{
    WorkloadKind kind = WorkloadKind::uniform_box;
    std::size_t n_particles = 4096;
    double box_side = 1.0;
    std::uint64_t seed = 0;
    std::size_t blob_count = 8;
    // Fraction of box_side.
    double blob_sigma = 0.05;
    // Neighbour target used only to initialise smoothing lengths.
    std::size_t k_neighbors = default_k_neighbors;
    std::size_t aos_record_bytes = 224;
};

inline void validate(const WorkloadSpec& spec)
{
    if (spec.n_particles < 1)
        throw std::invalid_argument("n_particles must be >= 1");
    if (!(spec.box_side > 0.0) || !std::isfinite(spec.box_side))
        throw std::invalid_argument("box_side must be positive and finite");
    if (spec.kind == WorkloadKind::gaussian_blobs && (spec.blob_count < 1 || !(spec.blob_sigma > 0.0)))
        throw std::invalid_argument("blobs need blob_count >= 1 and blob_sigma > 0");
    if (spec.kind == WorkloadKind::lattice) {
        const auto side = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(spec.n_particles))));
        if (side * side * side != spec.n_particles)
            throw std::invalid_argument("lattice workloads need a perfect-cube particle count");
    }
}

/// Resets every smoothing length to the radius expected to hold k neighbours.
inline void initialize_smoothing_lengths(ParticleAoS& particles, double box_side, std::size_t k)
{
    const double h0 = initial_smoothing_length(box_side, particles.size(), k);
    for (std::size_t i = 0; i < particles.size(); ++i)
        particles[i].smoothing_length = h0;
}

inline ParticleAoS generate(const WorkloadSpec& spec)
{
    validate(spec);
    const std::size_t n = spec.n_particles;
    const double L = spec.box_side;
    ParticleAoS particles(n, spec.aos_record_bytes);
    SplitMix64 rng(spec.seed);

    // Maps into [0, L); fmod can return L for tiny negative inputs.
    const auto wrap = [L](double v) {
        double w = std::fmod(v, L);
        if (w < 0.0)
            w += L;
        return w >= L ? 0.0 : w;
    };

    switch (spec.kind) {
    case WorkloadKind::uniform_box:
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.next_double() * L;
            const double y = rng.next_double() * L;
            const double z = rng.next_double() * L;
            particles[i].position = {wrap(x), wrap(y), wrap(z)};
        }
        break;
    case WorkloadKind::lattice: {
        const auto side = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(n))));
        const double a = L / static_cast<double>(side);
        std::size_t i = 0;
        for (std::size_t ix = 0; ix < side; ++ix)
            for (std::size_t iy = 0; iy < side; ++iy)
                for (std::size_t iz = 0; iz < side; ++iz)
                    particles[i++].position = {static_cast<double>(ix) * a, static_cast<double>(iy) * a,
                                               static_cast<double>(iz) * a};
        break;
    }
    case WorkloadKind::gaussian_blobs: {
        std::vector<Vec3> centers(spec.blob_count);
        for (Vec3& c : centers) {
            const double x = rng.next_double() * L;
            const double y = rng.next_double() * L;
            const double z = rng.next_double() * L;
            c = {x, y, z};
        }
        const double sigma = spec.blob_sigma * L;
        // Box-Muller; 1 - u keeps the log argument in (0, 1].
        const auto normal_pair = [&rng]() {
            const double u1 = 1.0 - rng.next_double();
            const double u2 = rng.next_double();
            const double r = std::sqrt(-2.0 * std::log(u1));
            return std::pair{r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
        };
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& c = centers[i % spec.blob_count];
            const auto [g1, g2] = normal_pair();
            const auto [g3, unused] = normal_pair();
            (void)unused;
            particles[i].position = {wrap(c.x + sigma * g1), wrap(c.y + sigma * g2), wrap(c.z + sigma * g3)};
        }
        break;
    }
    }

    for (std::size_t i = 0; i < n; ++i) {
        ParticleRecord& p = particles[i];
        p.id = static_cast<std::int64_t>(i);
        p.mass = 1.0;
        p.density = 0.0;
        p.needs_recompute = true;
    }
    initialize_smoothing_lengths(particles, L, spec.k_neighbors);
    return particles;
}

}  // namespace sphlab
