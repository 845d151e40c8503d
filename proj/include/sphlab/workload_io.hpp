#pragma once

#include "sphlab/particle_model.hpp"
#include "sphlab/snapshot.hpp"
#include "sphlab/workload.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sphlab {

// Section payloads. Numeric arrays are stored field by field (all ids, then
// all x, ...), preceded by a u64 element count.

inline constexpr std::string_view particles_section = "particles";
inline constexpr std::string_view config_section = "config";
inline constexpr std::string_view results_section = "results";

inline std::vector<std::byte> encode_particles(const ParticleAoS& particles)
{
    const std::size_t n = particles.size();
    ByteWriter w;
    w.put_u64(n);
    for (std::size_t i = 0; i < n; ++i)
        w.put_i64(particles[i].id);
    for (std::size_t i = 0; i < n; ++i)
        w.put_f64(particles[i].position.x);
    for (std::size_t i = 0; i < n; ++i)
        w.put_f64(particles[i].position.y);
    for (std::size_t i = 0; i < n; ++i)
        w.put_f64(particles[i].position.z);
    for (std::size_t i = 0; i < n; ++i)
        w.put_f64(particles[i].mass);
    for (std::size_t i = 0; i < n; ++i)
        w.put_f64(particles[i].smoothing_length);
    for (std::size_t i = 0; i < n; ++i)
        w.put_f64(particles[i].density);
    for (std::size_t i = 0; i < n; ++i)
        w.put_u64(particles[i].needs_recompute ? 1 : 0);
    return w.take();
}

inline ParticleAoS decode_particles(std::span<const std::byte> payload, std::size_t record_bytes = 224)
{
    ByteReader r(payload, "particles section");
    const std::uint64_t n = r.get_u64();
    if (n > r.remaining() / 64 || r.remaining() != n * 64)
        throw SnapshotError(SnapshotErrc::malformed, "particles section: size does not match particle count");
    ParticleAoS particles(static_cast<std::size_t>(n), record_bytes);
    for (std::size_t i = 0; i < n; ++i)
        particles[i].id = r.get_i64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].position.x = r.get_f64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].position.y = r.get_f64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].position.z = r.get_f64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].mass = r.get_f64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].smoothing_length = r.get_f64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].density = r.get_f64();
    for (std::size_t i = 0; i < n; ++i)
        particles[i].needs_recompute = r.get_u64() != 0;
    return particles;
}

inline nlohmann::json to_json(const WorkloadSpec& spec)
{
    return {{"kind", std::string(to_string(spec.kind))},
            {"n_particles", spec.n_particles},
            {"box_side", spec.box_side},
            {"seed", spec.seed},
            {"blob_count", spec.blob_count},
            {"blob_sigma", spec.blob_sigma},
            {"k_neighbors", spec.k_neighbors},
            {"aos_record_bytes", spec.aos_record_bytes}};
}

inline WorkloadSpec workload_spec_from_json(const nlohmann::json& j)
{
    WorkloadSpec spec;
    spec.kind = parse_workload_kind(j.at("kind").get<std::string>());
    spec.n_particles = j.at("n_particles").get<std::size_t>();
    spec.box_side = j.at("box_side").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.blob_count = j.value("blob_count", spec.blob_count);
    spec.blob_sigma = j.value("blob_sigma", spec.blob_sigma);
    spec.k_neighbors = j.value("k_neighbors", spec.k_neighbors);
    spec.aos_record_bytes = j.value("aos_record_bytes", spec.aos_record_bytes);
    return spec;
}

struct Workload
{
    WorkloadSpec spec;
    ParticleAoS particles;
};

inline void save_workload(const std::filesystem::path& path, const WorkloadSpec& spec, const ParticleAoS& particles)
{
    ByteWriter config;
    config.put_text(to_json(spec).dump());
    dump(path, {{std::string(config_section), config.take()},
                {std::string(particles_section), encode_particles(particles)}});
}

inline Workload load_workload(const std::filesystem::path& path)
{
    const SectionMap sections = load(path);
    const Section* config = find_section(sections, config_section);
    const Section* particles = find_section(sections, particles_section);
    if (!config || !particles)
        throw SnapshotError(SnapshotErrc::malformed, path.string() + ": missing config or particles section");
    WorkloadSpec spec;
    try {
        const std::string text(reinterpret_cast<const char*>(config->payload.data()), config->payload.size());
        spec = workload_spec_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw SnapshotError(SnapshotErrc::malformed, path.string() + ": bad config section: " + e.what());
    }
    return {spec, decode_particles(particles->payload, spec.aos_record_bytes)};
}

struct DensityResults
{
    std::vector<double> densities;
    std::vector<double> smoothing_lengths;
};

inline std::vector<std::byte> encode_results(const DensityResults& results)
{
    ByteWriter w;
    w.put_u64(results.densities.size());
    for (double d : results.densities)
        w.put_f64(d);
    for (double h : results.smoothing_lengths)
        w.put_f64(h);
    return w.take();
}

inline DensityResults decode_results(std::span<const std::byte> payload)
{
    ByteReader r(payload, "results section");
    const std::uint64_t n = r.get_u64();
    if (n > r.remaining() / 16 || r.remaining() != n * 16)
        throw SnapshotError(SnapshotErrc::malformed, "results section: size does not match particle count");
    DensityResults out;
    out.densities.resize(n);
    out.smoothing_lengths.resize(n);
    for (double& d : out.densities)
        d = r.get_f64();
    for (double& h : out.smoothing_lengths)
        h = r.get_f64();
    return out;
}

inline DensityResults results_of(const ParticleAoS& particles)
{
    DensityResults out;
    for (std::size_t i = 0; i < particles.size(); ++i) {
        out.densities.push_back(particles[i].density);
        out.smoothing_lengths.push_back(particles[i].smoothing_length);
    }
    return out;
}

inline void save_results(const std::filesystem::path& path, const DensityResults& results,
                         const nlohmann::json& run_info = nlohmann::json::object())
{
    ByteWriter config;
    config.put_text(run_info.dump());
    dump(path, {{std::string(config_section), config.take()},
                {std::string(results_section), encode_results(results)}});
}

inline DensityResults load_results(const std::filesystem::path& path)
{
    const SectionMap sections = load(path);
    const Section* results = find_section(sections, results_section);
    if (!results)
        throw SnapshotError(SnapshotErrc::malformed, path.string() + ": no results section");
    return decode_results(results->payload);
}

}  // namespace sphlab
