#include "sphlab/density.hpp"
#include "sphlab/particle_model.hpp"
#include "sphlab/workload.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>

using namespace sphlab;

namespace {

ParticleAoS random_particles(std::size_t n, std::uint64_t seed, std::size_t record_bytes = 224)
{
    ParticleAoS p(n, record_bytes);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        p[i].id = static_cast<std::int64_t>(rng.next());
        p[i].position = {rng.next_double(), rng.next_double() - 0.5, rng.next_double() * 1e6};
        p[i].mass = 0.1 + rng.next_double();
        p[i].smoothing_length = 0.01 + rng.next_double();
        p[i].density = rng.next_double() * 100.0;
        p[i].needs_recompute = (rng.next() & 1) != 0;
    }
    return p;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

void expect_identical(const ParticleRecord& a, const ParticleRecord& b)
{
    EXPECT_EQ(a.id, b.id);
    EXPECT_TRUE(same_bits(a.position.x, b.position.x));
    EXPECT_TRUE(same_bits(a.position.y, b.position.y));
    EXPECT_TRUE(same_bits(a.position.z, b.position.z));
    EXPECT_TRUE(same_bits(a.mass, b.mass));
    EXPECT_TRUE(same_bits(a.smoothing_length, b.smoothing_length));
    EXPECT_TRUE(same_bits(a.density, b.density));
    EXPECT_EQ(a.needs_recompute, b.needs_recompute);
}

}  // namespace

TEST(ParticleModel, GatherEmpty)
{
    const ParticleAoS aos;
    const ParticleSoA soa = gather_to_soa(aos);
    EXPECT_EQ(soa.count(), 0u);
    EXPECT_TRUE(soa.masses.empty());
    EXPECT_TRUE(soa.positions_z.empty());
}

TEST(ParticleModel, GatherSingleParticle)
{
    ParticleAoS aos(1);
    aos[0].position = {1, 2, 3};
    aos[0].mass = 5;
    const ParticleSoA soa = gather_to_soa(aos);
    ASSERT_EQ(soa.count(), 1u);
    EXPECT_EQ(soa.positions_x[0], 1.0);
    EXPECT_EQ(soa.positions_y[0], 2.0);
    EXPECT_EQ(soa.positions_z[0], 3.0);
    EXPECT_EQ(soa.masses[0], 5.0);
}

TEST(ParticleModel, RoundTripIsBitExact)
{
    for (std::size_t n : {std::size_t{10'000}, std::size_t{100'000}}) {
        const ParticleAoS original = random_particles(n, n);
        ParticleAoS copy = original;
        // Overwrite every live field so the scatter has to restore all of them.
        for (std::size_t i = 0; i < n; ++i)
            copy[i] = ParticleRecord{};
        scatter_from_soa(gather_to_soa(original), copy, all_fields);
        for (std::size_t i = 0; i < n; ++i)
            expect_identical(copy[i], original[i]);
    }
}

TEST(ParticleModel, ParallelGatherMatchesSerial)
{
    const ParticleAoS aos = random_particles(5000, 3);
    const ParticleSoA a = gather_to_soa(aos, 1);
    const ParticleSoA b = gather_to_soa(aos, 7);
    EXPECT_EQ(a.positions_x, b.positions_x);
    EXPECT_EQ(a.densities, b.densities);
    EXPECT_EQ(a.needs_recompute, b.needs_recompute);
    EXPECT_EQ(a.ids, b.ids);
}

TEST(ParticleModel, ScatterWritesOnlyMaskedFields)
{
    ParticleAoS aos(1);
    aos[0].mass = 3.0;
    aos[0].density = 1.0;
    aos[0].smoothing_length = 0.5;
    ParticleSoA soa = gather_to_soa(aos);
    soa.densities[0] = 7.0;
    soa.masses[0] = 99.0;
    soa.smoothing_lengths[0] = 42.0;
    scatter_from_soa(soa, aos, Field::density);
    EXPECT_EQ(aos[0].density, 7.0);
    EXPECT_EQ(aos[0].mass, 3.0);
    EXPECT_EQ(aos[0].smoothing_length, 0.5);
}

TEST(ParticleModel, ScatterAllFieldsFromArbitrarySoA)
{
    const ParticleAoS source = random_particles(300, 11);
    ParticleSoA soa = gather_to_soa(source);
    ParticleAoS target = random_particles(300, 12);
    scatter_from_soa(soa, target, all_fields);
    const ParticleSoA back = gather_to_soa(target);
    EXPECT_EQ(back.ids, soa.ids);
    EXPECT_EQ(back.positions_y, soa.positions_y);
    EXPECT_EQ(back.masses, soa.masses);
    EXPECT_EQ(back.smoothing_lengths, soa.smoothing_lengths);
    EXPECT_EQ(back.needs_recompute, soa.needs_recompute);
}

TEST(ParticleModel, ScatterSizeMismatchThrows)
{
    ParticleAoS aos(3);
    ParticleSoA soa;
    soa.resize(2);
    EXPECT_THROW(scatter_from_soa(soa, aos), LayoutError);
}

TEST(ParticleModel, RecordFootprint)
{
    EXPECT_THROW(ParticleAoS(1, 32), LayoutError);
    EXPECT_THROW(ParticleAoS(1, 100), LayoutError);
    const ParticleAoS compact(4, 64);
    EXPECT_EQ(compact.record_bytes(), 64u);
    EXPECT_EQ(compact.padding(0).size(), 64 - sizeof(ParticleRecord));
    const ParticleAoS big(4);
    EXPECT_EQ(big.record_bytes(), 224u);
    EXPECT_EQ(big.padding(3).size(), 224 - sizeof(ParticleRecord));
    EXPECT_LE(ParticleSoA::bytes_per_particle, 64u);
}

TEST(ParticleModel, PushBackKeepsEarlierRecords)
{
    ParticleAoS aos(0, 96);
    for (int i = 0; i < 100; ++i) {
        ParticleRecord r;
        r.id = i;
        r.mass = i + 0.5;
        aos.push_back(r);
    }
    ASSERT_EQ(aos.size(), 100u);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(aos[i].id, i);
        EXPECT_EQ(aos[i].mass, i + 0.5);
    }
}

TEST(ParticleModel, DensityPassLeavesPaddingUntouched)
{
    WorkloadSpec spec;
    spec.n_particles = 600;
    spec.k_neighbors = 16;
    spec.seed = 5;
    ParticleAoS p = generate(spec);
    for (std::size_t i = 0; i < p.size(); ++i)
        std::fill(p.padding(i).begin(), p.padding(i).end(), std::byte{0x3C});
    for (const char* name : {"original", "optimised"}) {
        initialize_smoothing_lengths(p, spec.box_side, 16);
        compute_density_pass(p, preset(name, 16), 2);
        for (std::size_t i = 0; i < p.size(); ++i)
            ASSERT_TRUE(std::all_of(p.padding(i).begin(), p.padding(i).end(),
                                    [](std::byte b) { return b == std::byte{0x3C}; }))
                << name << " particle " << i;
    }
}

TEST(ParticleModel, LayoutOverheadIsSmall)
{
    WorkloadSpec spec;
    spec.n_particles = 8000;
    spec.k_neighbors = 64;
    ParticleAoS p = generate(spec);
    const PassResult r = compute_density_pass(p, preset("optimised", 64), 1);
    EXPECT_GT(r.stats.phase_times.layout, 0.0);
    EXPECT_LT(r.stats.phase_times.layout, 0.10 * r.stats.total_time);
}
