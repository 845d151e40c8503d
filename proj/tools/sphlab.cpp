// sphlab: workload generation, benchmark runs and speedup reports for the
// density-pass variants.

#include "sphlab/sphlab.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace {

enum ExitCode : int { ok = 0, usage = 1, correctness = 2, io = 3 };

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct CorrectnessError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct GenOptions
{
    std::string kind = "uniform";
    std::size_t n = 0;
    double box = 1.0;
    std::uint64_t seed = 0;
    std::size_t blobs = 8;
    double sigma = 0.05;
    std::size_t k = sphlab::default_k_neighbors;
    std::size_t record_bytes = 224;
    std::string out;
};

struct RunOptions
{
    std::string snapshot;
    std::vector<std::string> variants{"optimised"};
    std::vector<unsigned> threads{1};
    std::size_t repeats = 3;
    std::size_t k = sphlab::default_k_neighbors;
    std::size_t chunk = sphlab::default_chunk_size;
    std::size_t leaf = sphlab::Octree::default_leaf_capacity;
    int max_iterations = sphlab::default_max_iterations;
    std::string csv;
    std::string results;
};

struct ReportOptions
{
    std::string csv;
    std::string baseline = "original:1";
    std::optional<double> t_scalar;
    std::optional<double> t_vector;
    std::string scalar_csv;
    std::string vector_csv;
    std::string loop_column = "t_interact_s";
    std::string loop_variant = "vectorised";
    unsigned vl = 0;
    std::string csv_out;
};

struct VerifyOptions
{
    std::string a;
    std::string b;
    double rtol = 1e-9;
};

int cmd_gen(const GenOptions& o)
{
    sphlab::WorkloadSpec spec;
    try {
        spec.kind = sphlab::parse_workload_kind(o.kind);
        spec.n_particles = o.n;
        spec.box_side = o.box;
        spec.seed = o.seed;
        spec.blob_count = o.blobs;
        spec.blob_sigma = o.sigma;
        spec.k_neighbors = o.k;
        spec.aos_record_bytes = o.record_bytes;
        sphlab::validate(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const sphlab::ParticleAoS particles = sphlab::generate(spec);
    sphlab::save_workload(o.out, spec, particles);
    std::cout << "wrote " << particles.size() << " particles to " << o.out << "\n";
    return ok;
}

void append_csv(const std::string& path, const std::vector<sphlab::BenchRecord>& records)
{
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw sphlab::SnapshotError(sphlab::SnapshotErrc::io, "cannot open '" + path + "' for appending");
    if (fresh)
        out << sphlab::bench_csv_header << '\n';
    for (const auto& r : records)
        out << sphlab::to_csv_row(r) << '\n';
}

int cmd_run(const RunOptions& o)
{
    sphlab::Workload workload = sphlab::load_workload(o.snapshot);
    std::vector<sphlab::BenchRecord> records;
    std::optional<sphlab::DensityResults> last_results;

    for (const std::string& variant : o.variants) {
        sphlab::VariantConfig config = sphlab::preset(variant, o.k);
        config.chunk_size = o.chunk;
        config.leaf_capacity = o.leaf;
        config.max_iterations = o.max_iterations;
        for (unsigned threads : o.threads) {
            std::vector<double> totals;
            for (std::size_t rep = 0; rep < o.repeats; ++rep) {
                sphlab::ParticleAoS particles = workload.particles;
                sphlab::initialize_smoothing_lengths(particles, workload.spec.box_side, o.k);
                const sphlab::PassResult pass = sphlab::compute_density_pass(particles, config, threads);
                const std::uint64_t sum = sphlab::checksum64(std::span<const double>(pass.densities));
                records.push_back(sphlab::make_record(variant, threads, o.k, rep, pass, sum));
                totals.push_back(pass.stats.total_time);
                last_results = sphlab::results_of(particles);
            }
            const auto& r = records.back();
            std::cout << variant << " threads=" << threads << " n=" << r.n_particles << " k=" << o.k
                      << " iterations=" << r.iterations << " t_median=" << sphlab::median(totals) << "s"
                      << " checksum=" << sphlab::hex64(r.checksum) << "\n";
        }
    }

    if (!o.csv.empty())
        append_csv(o.csv, records);
    if (!o.results.empty() && last_results) {
        nlohmann::json info = {{"snapshot", o.snapshot}, {"k", o.k}, {"variant", records.back().variant}};
        sphlab::save_results(o.results, *last_results, info);
    }

    std::set<std::uint64_t> sums;
    for (const auto& r : records)
        sums.insert(r.checksum);
    if (sums.size() > 1)
        throw CorrectnessError("density checksums diverge across " + std::to_string(records.size()) +
                               " runs (" + std::to_string(sums.size()) + " distinct values)");
    return ok;
}

std::pair<std::string, unsigned> parse_selector(const std::string& s)
{
    const auto colon = s.rfind(':');
    if (colon == std::string::npos)
        return {s, 1u};
    try {
        return {s.substr(0, colon), static_cast<unsigned>(std::stoul(s.substr(colon + 1)))};
    } catch (const std::exception&) {
        throw UsageError("bad baseline selector '" + s + "', expected variant:threads");
    }
}

std::vector<sphlab::BenchRecord> read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw sphlab::SnapshotError(sphlab::SnapshotErrc::io, "cannot open '" + path + "'");
    return sphlab::read_bench_csv(in);
}

double loop_time(const std::string& path, const std::string& column, const std::string& variant)
{
    std::vector<double> values;
    for (const auto& r : read_csv_file(path))
        if (variant.empty() || r.variant == variant)
            values.push_back(sphlab::column_value(r, column));
    if (values.empty())
        throw UsageError("no rows for variant '" + variant + "' in " + path);
    return sphlab::median(values);
}

int cmd_report(const ReportOptions& o)
{
    const auto [variant, threads] = parse_selector(o.baseline);
    sphlab::SpeedupReport report;
    try {
        report = sphlab::build_report(read_csv_file(o.csv), variant, threads);
    } catch (const sphlab::ReportError& e) {
        throw UsageError(e.what());
    }

    std::optional<double> t_scalar = o.t_scalar;
    std::optional<double> t_vector = o.t_vector;
    if (!o.scalar_csv.empty())
        t_scalar = loop_time(o.scalar_csv, o.loop_column, o.loop_variant);
    if (!o.vector_csv.empty())
        t_vector = loop_time(o.vector_csv, o.loop_column, o.loop_variant);
    if (t_scalar && t_vector) {
        if (o.vl == 0)
            throw UsageError("--vl is required to compute S_v and epsilon");
        report.vector = sphlab::vector_metrics(*t_scalar, *t_vector, o.vl);
    } else if (t_scalar || t_vector) {
        throw UsageError("S_v needs both a scalar and a vector loop timing");
    }

    std::cout << sphlab::to_markdown(report);
    if (!o.csv_out.empty()) {
        std::ofstream out(o.csv_out);
        if (!out)
            throw sphlab::SnapshotError(sphlab::SnapshotErrc::io, "cannot write '" + o.csv_out + "'");
        out << sphlab::to_csv(report);
    }
    return ok;
}

int cmd_verify(const VerifyOptions& o)
{
    const auto a = sphlab::load_results(o.a);
    const auto b = sphlab::load_results(o.b);
    if (a.densities.size() != b.densities.size())
        throw CorrectnessError("particle counts differ: " + std::to_string(a.densities.size()) + " vs " +
                               std::to_string(b.densities.size()));
    double worst = 0.0;
    std::size_t worst_at = 0;
    const auto rel = [](double x, double y) {
        const double scale = std::max(std::abs(x), std::abs(y));
        return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
    };
    for (std::size_t i = 0; i < a.densities.size(); ++i) {
        const double e = std::max(rel(a.densities[i], b.densities[i]),
                                  rel(a.smoothing_lengths[i], b.smoothing_lengths[i]));
        if (!(e <= worst)) {
            worst = e;
            worst_at = i;
        }
    }
    std::cout << "max relative difference " << worst << " at particle " << worst_at << "\n";
    if (!(worst <= o.rtol))
        throw CorrectnessError("results differ beyond rtol " + std::to_string(o.rtol));
    return ok;
}

unsigned default_threads()
{
    if (const char* env = std::getenv("SPHLAB_THREADS")) {
        try {
            const unsigned long v = std::stoul(env);
            if (v >= 1)
                return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("SPHLAB_THREADS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sphlab - SPH density kernel optimisation ladder benchmark"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic workload snapshot");
    gen_cmd->add_option("--kind", gen.kind, "uniform | blobs | lattice")
        ->check(CLI::IsMember({"uniform", "blobs", "lattice"}));
    gen_cmd->add_option("--n", gen.n, "Number of particles")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--box", gen.box, "Box side length")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "PRNG seed");
    gen_cmd->add_option("--blobs", gen.blobs, "Blob count (blobs kind)")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--sigma", gen.sigma, "Blob sigma as a fraction of the box")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--k", gen.k, "Neighbour target for the initial smoothing length")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--record-bytes", gen.record_bytes, "AoS record footprint in bytes");
    gen_cmd->add_option("--out", gen.out, "Output snapshot path")->required();

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run density passes and append benchmark rows");
    run_cmd->add_option("snapshot", run.snapshot, "Workload snapshot")->required();
    run_cmd->add_option("--variant", run.variants, "Preset(s)")
        ->delimiter(',')
        ->check(CLI::IsMember(std::vector<std::string>(sphlab::preset_names.begin(), sphlab::preset_names.end())));
    auto* threads_opt = run_cmd->add_option("--threads", run.threads, "Thread count(s), e.g. 1,2,4,8")
                            ->delimiter(',')
                            ->check(CLI::PositiveNumber);
    run_cmd->add_option("--repeats", run.repeats, "Repeats per configuration")->check(CLI::PositiveNumber);
    run_cmd->add_option("--k", run.k, "Neighbours per particle")->check(CLI::PositiveNumber);
    run_cmd->add_option("--chunk", run.chunk, "Dynamic scheduling chunk size")->check(CLI::PositiveNumber);
    run_cmd->add_option("--leaf", run.leaf, "Octree leaf capacity")->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-iterations", run.max_iterations, "Outer iteration limit")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--csv", run.csv, "Append benchmark rows to this CSV");
    run_cmd->add_option("--results", run.results, "Write the final densities to a result snapshot");

    ReportOptions rep;
    auto* report_cmd = app.add_subcommand("report", "Speedup / efficiency table from benchmark CSV");
    report_cmd->add_option("csv", rep.csv, "Benchmark CSV")->required();
    report_cmd->add_option("--baseline", rep.baseline, "Baseline as variant:threads");
    report_cmd->add_option("--t-scalar", rep.t_scalar, "Scalar loop time (s)")->check(CLI::PositiveNumber);
    report_cmd->add_option("--t-vector", rep.t_vector, "Vector loop time (s)")->check(CLI::PositiveNumber);
    report_cmd->add_option("--scalar-csv", rep.scalar_csv, "CSV from a build without auto-vectorisation");
    report_cmd->add_option("--vector-csv", rep.vector_csv, "CSV from a vectorising build");
    report_cmd->add_option("--loop-column", rep.loop_column, "Timing column holding the loop time");
    report_cmd->add_option("--loop-variant", rep.loop_variant, "Variant whose rows provide the loop time");
    report_cmd->add_option("--vl", rep.vl, "Vector length (doubles per SIMD register)")
        ->check(CLI::PositiveNumber);
    report_cmd->add_option("--csv-out", rep.csv_out, "Also write the report as CSV");

    VerifyOptions ver;
    auto* verify_cmd = app.add_subcommand("verify", "Compare two result snapshots field-wise");
    verify_cmd->add_option("a", ver.a)->required();
    verify_cmd->add_option("b", ver.b)->required();
    verify_cmd->add_option("--rtol", ver.rtol, "Relative tolerance")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }

    try {
        if (*gen_cmd)
            return cmd_gen(gen);
        if (*run_cmd) {
            if (threads_opt->count() == 0)
                run.threads = {default_threads()};
            return cmd_run(run);
        }
        if (*report_cmd)
            return cmd_report(rep);
        if (*verify_cmd)
            return cmd_verify(ver);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const CorrectnessError& e) {
        std::cerr << "correctness failure: " << e.what() << "\n";
        return correctness;
    } catch (const sphlab::PassError& e) {
        std::cerr << "correctness failure: " << e.what() << "\n";
        return correctness;
    } catch (const sphlab::SnapshotError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return io;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
