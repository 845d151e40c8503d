#pragma once

#include "sphlab/detail/parallel.hpp"
#include "sphlab/vec3.hpp"

#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphlab {

enum class LayoutKind { aos, soa };

struct LayoutConfig
{
    std::size_t aos_record_bytes = 224;
    LayoutKind layout_kind = LayoutKind::aos;
};

class LayoutError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Live fields of one particle. Stored at the head of every AoS record; the
/// remainder of the record is opaque padding standing in for the physics
/// fields a full simulation code would carry.
struct ParticleRecord
{
    std::int64_t id = 0;
    Vec3 position;
    double mass = 1.0;
    double smoothing_length = 0.0;
    double density = 0.0;
    bool needs_recompute = true;
};

inline constexpr std::size_t min_record_bytes = 64;
static_assert(sizeof(ParticleRecord) <= min_record_bytes);

/// Array of fixed-stride records. Each record is a ParticleRecord followed by
/// `record_bytes - sizeof(ParticleRecord)` padding bytes that no computation
/// touches.
class ParticleAoS
{
public:
    static constexpr std::byte padding_fill{0xA5};

    explicit ParticleAoS(std::size_t count = 0, std::size_t record_bytes = 224) : record_bytes_(record_bytes)
    {
        if (record_bytes_ < min_record_bytes || record_bytes_ % alignof(ParticleRecord) != 0)
            throw LayoutError("aos_record_bytes must be >= 64 and a multiple of " +
                              std::to_string(alignof(ParticleRecord)) + ", got " + std::to_string(record_bytes_));
        resize(count);
    }

    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    std::size_t record_bytes() const noexcept { return record_bytes_; }

    void resize(std::size_t count)
    {
        const std::size_t old = count_;
        storage_.resize(count * record_bytes_, padding_fill);
        count_ = count;
        for (std::size_t i = old; i < count; ++i)
            ::new (static_cast<void*>(record_ptr(i))) ParticleRecord{};
    }

    void push_back(const ParticleRecord& record)
    {
        resize(count_ + 1);
        (*this)[count_ - 1] = record;
    }

    ParticleRecord& operator[](std::size_t i) noexcept
    {
        return *std::launder(reinterpret_cast<ParticleRecord*>(record_ptr(i)));
    }
    const ParticleRecord& operator[](std::size_t i) const noexcept
    {
        return *std::launder(reinterpret_cast<const ParticleRecord*>(record_ptr(i)));
    }

    std::span<std::byte> padding(std::size_t i) noexcept
    {
        return {record_ptr(i) + sizeof(ParticleRecord), record_bytes_ - sizeof(ParticleRecord)};
    }
    std::span<const std::byte> padding(std::size_t i) const noexcept
    {
        return {record_ptr(i) + sizeof(ParticleRecord), record_bytes_ - sizeof(ParticleRecord)};
    }

private:
    std::byte* record_ptr(std::size_t i) noexcept { return storage_.data() + i * record_bytes_; }
    const std::byte* record_ptr(std::size_t i) const noexcept { return storage_.data() + i * record_bytes_; }

    std::size_t record_bytes_;
    std::size_t count_ = 0;
    std::vector<std::byte> storage_;
};

/// Compact per-field arrays holding only what the density kernel touches.
struct ParticleSoA
{
    std::vector<std::int64_t> ids;
    std::vector<double> positions_x;
    std::vector<double> positions_y;
    std::vector<double> positions_z;
    std::vector<double> masses;
    std::vector<double> smoothing_lengths;
    std::vector<double> densities;
    std::vector<std::uint8_t> needs_recompute;

    static constexpr std::size_t bytes_per_particle =
        sizeof(std::int64_t) + 6 * sizeof(double) + sizeof(std::uint8_t);

    std::size_t count() const noexcept { return positions_x.size(); }

    void resize(std::size_t n)
    {
        ids.resize(n);
        positions_x.resize(n);
        positions_y.resize(n);
        positions_z.resize(n);
        masses.resize(n);
        smoothing_lengths.resize(n);
        densities.resize(n);
        needs_recompute.resize(n);
    }
};

static_assert(ParticleSoA::bytes_per_particle <= 64);

enum class Field : unsigned {
    none = 0,
    id = 1u << 0,
    position = 1u << 1,
    mass = 1u << 2,
    smoothing_length = 1u << 3,
    density = 1u << 4,
    needs_recompute = 1u << 5,
};

constexpr Field operator|(Field a, Field b) noexcept
{
    return static_cast<Field>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has(Field mask, Field f) noexcept
{
    return (static_cast<unsigned>(mask) & static_cast<unsigned>(f)) != 0;
}

inline constexpr Field all_fields =
    Field::id | Field::position | Field::mass | Field::smoothing_length | Field::density | Field::needs_recompute;
inline constexpr Field default_writeback = Field::density | Field::smoothing_length | Field::needs_recompute;

inline void gather_range(const ParticleAoS& aos, ParticleSoA& soa, std::size_t begin, std::size_t end) noexcept
{
    for (std::size_t i = begin; i < end; ++i) {
        const ParticleRecord& p = aos[i];
        soa.ids[i] = p.id;
        soa.positions_x[i] = p.position.x;
        soa.positions_y[i] = p.position.y;
        soa.positions_z[i] = p.position.z;
        soa.masses[i] = p.mass;
        soa.smoothing_lengths[i] = p.smoothing_length;
        soa.densities[i] = p.density;
        soa.needs_recompute[i] = p.needs_recompute ? 1 : 0;
    }
}

inline ParticleSoA gather_to_soa(const ParticleAoS& aos, unsigned workers = 1)
{
    ParticleSoA soa;
    soa.resize(aos.size());
    detail::for_each_range(aos.size(), workers,
                           [&](std::size_t b, std::size_t e) { gather_range(aos, soa, b, e); });
    return soa;
}

inline void scatter_range(const ParticleSoA& soa, ParticleAoS& aos, Field mask, std::size_t begin,
                          std::size_t end) noexcept
{
    for (std::size_t i = begin; i < end; ++i) {
        ParticleRecord& p = aos[i];
        if (has(mask, Field::id))
            p.id = soa.ids[i];
        if (has(mask, Field::position))
            p.position = {soa.positions_x[i], soa.positions_y[i], soa.positions_z[i]};
        if (has(mask, Field::mass))
            p.mass = soa.masses[i];
        if (has(mask, Field::smoothing_length))
            p.smoothing_length = soa.smoothing_lengths[i];
        if (has(mask, Field::density))
            p.density = soa.densities[i];
        if (has(mask, Field::needs_recompute))
            p.needs_recompute = soa.needs_recompute[i] != 0;
    }
}

inline void scatter_from_soa(const ParticleSoA& soa, ParticleAoS& aos, Field mask = default_writeback,
                             unsigned workers = 1)
{
    if (soa.count() != aos.size())
        throw LayoutError("scatter_from_soa: SoA holds " + std::to_string(soa.count()) +
                          " particles but the AoS collection holds " + std::to_string(aos.size()));
    detail::for_each_range(aos.size(), workers,
                           [&](std::size_t b, std::size_t e) { scatter_range(soa, aos, mask, b, e); });
}

// Uniform accessors so the density pass and tree can be instantiated over either layout.

class AosView
{
public:
    explicit AosView(ParticleAoS& p) noexcept : p_(&p) {}

    std::size_t size() const noexcept { return p_->size(); }
    Vec3 position(std::size_t i) const noexcept { return (*p_)[i].position; }
    double mass(std::size_t i) const noexcept { return (*p_)[i].mass; }
    double smoothing_length(std::size_t i) const noexcept { return (*p_)[i].smoothing_length; }
    bool needs_recompute(std::size_t i) const noexcept { return (*p_)[i].needs_recompute; }
    double density(std::size_t i) const noexcept { return (*p_)[i].density; }

    void set_smoothing_length(std::size_t i, double h) noexcept { (*p_)[i].smoothing_length = h; }
    void set_density(std::size_t i, double rho) noexcept { (*p_)[i].density = rho; }
    void set_needs_recompute(std::size_t i, bool flag) noexcept { (*p_)[i].needs_recompute = flag; }

private:
    ParticleAoS* p_;
};

class SoaView
{
public:
    explicit SoaView(ParticleSoA& s) noexcept : s_(&s) {}

    std::size_t size() const noexcept { return s_->count(); }
    Vec3 position(std::size_t i) const noexcept
    {
        return {s_->positions_x[i], s_->positions_y[i], s_->positions_z[i]};
    }
    double mass(std::size_t i) const noexcept { return s_->masses[i]; }
    double smoothing_length(std::size_t i) const noexcept { return s_->smoothing_lengths[i]; }
    bool needs_recompute(std::size_t i) const noexcept { return s_->needs_recompute[i] != 0; }
    double density(std::size_t i) const noexcept { return s_->densities[i]; }

    void set_smoothing_length(std::size_t i, double h) noexcept { s_->smoothing_lengths[i] = h; }
    void set_density(std::size_t i, double rho) noexcept { s_->densities[i] = rho; }
    void set_needs_recompute(std::size_t i, bool flag) noexcept { s_->needs_recompute[i] = flag ? 1 : 0; }

private:
    ParticleSoA* s_;
};

}  // namespace sphlab
