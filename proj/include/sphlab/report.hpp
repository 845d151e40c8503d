#pragma once

#include "sphlab/density.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sphlab {

inline constexpr std::string_view bench_csv_header =
    "variant,threads,n_particles,k,repeat,iterations,t_total_s,t_tree_s,t_search_s,t_select_s,t_interact_s,"
    "t_layout_s,t_contention_s,checksum_hex";

struct BenchRecord
{
    std::string variant;
    unsigned threads = 1;
    std::size_t n_particles = 0;
    std::size_t k = 0;
    std::size_t repeat = 0;
    std::size_t iterations = 0;
    double t_total_s = 0.0;
    double t_tree_s = 0.0;
    double t_search_s = 0.0;
    double t_select_s = 0.0;
    double t_interact_s = 0.0;
    double t_layout_s = 0.0;
    double t_contention_s = 0.0;
    std::uint64_t checksum = 0;
};

class ReportError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline BenchRecord make_record(std::string variant, unsigned threads, std::size_t k, std::size_t repeat,
                               const PassResult& pass, std::uint64_t checksum)
{
    const PassStats& s = pass.stats;
    BenchRecord r;
    r.variant = std::move(variant);
    r.threads = threads;
    r.n_particles = pass.densities.size();
    r.k = k;
    r.repeat = repeat;
    r.iterations = s.iteration_count;
    r.t_total_s = s.total_time;
    r.t_tree_s = s.phase_times.tree_build;
    r.t_search_s = s.phase_times.search;
    r.t_select_s = s.phase_times.select;
    r.t_interact_s = s.phase_times.interact;
    r.t_layout_s = s.phase_times.layout;
    r.t_contention_s = s.contention_time;
    r.checksum = checksum;
    return r;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string to_csv_row(const BenchRecord& r)
{
    std::ostringstream os;
    os.precision(9);
    os << r.variant << ',' << r.threads << ',' << r.n_particles << ',' << r.k << ',' << r.repeat << ','
       << r.iterations << ',' << r.t_total_s << ',' << r.t_tree_s << ',' << r.t_search_s << ',' << r.t_select_s
       << ',' << r.t_interact_s << ',' << r.t_layout_s << ',' << r.t_contention_s << ',' << hex64(r.checksum);
    return os.str();
}

namespace detail {

template<typename T>
T parse_field(std::string_view field, std::string_view column, int base = 10)
{
    T value{};
    const char* end = field.data() + field.size();
    std::from_chars_result res;
    if constexpr (std::is_floating_point_v<T>)
        res = std::from_chars(field.data(), end, value);
    else
        res = std::from_chars(field.data(), end, value, base);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ReportError("bad value '" + std::string(field) + "' in column " + std::string(column));
    return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

}  // namespace detail

inline BenchRecord parse_csv_row(std::string_view line)
{
    const auto f = detail::split_csv(line);
    if (f.size() != 14)
        throw ReportError("expected 14 columns, got " + std::to_string(f.size()) + ": " + std::string(line));
    using detail::parse_field;
    BenchRecord r;
    r.variant = std::string(f[0]);
    r.threads = parse_field<unsigned>(f[1], "threads");
    r.n_particles = parse_field<std::size_t>(f[2], "n_particles");
    r.k = parse_field<std::size_t>(f[3], "k");
    r.repeat = parse_field<std::size_t>(f[4], "repeat");
    r.iterations = parse_field<std::size_t>(f[5], "iterations");
    r.t_total_s = parse_field<double>(f[6], "t_total_s");
    r.t_tree_s = parse_field<double>(f[7], "t_tree_s");
    r.t_search_s = parse_field<double>(f[8], "t_search_s");
    r.t_select_s = parse_field<double>(f[9], "t_select_s");
    r.t_interact_s = parse_field<double>(f[10], "t_interact_s");
    r.t_layout_s = parse_field<double>(f[11], "t_layout_s");
    r.t_contention_s = parse_field<double>(f[12], "t_contention_s");
    r.checksum = parse_field<std::uint64_t>(f[13], "checksum_hex", 16);
    return r;
}

/// Reads records, skipping header and blank lines.
inline std::vector<BenchRecord> read_bench_csv(std::istream& in)
{
    std::vector<BenchRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line == bench_csv_header)
            continue;
        out.push_back(parse_csv_row(line));
    }
    return out;
}

/// Named timing column of a record, for the loop-timing inputs of the vector metrics.
inline double column_value(const BenchRecord& r, std::string_view column)
{
    static const std::map<std::string_view, double BenchRecord::*> columns = {
        {"t_total_s", &BenchRecord::t_total_s},       {"t_tree_s", &BenchRecord::t_tree_s},
        {"t_search_s", &BenchRecord::t_search_s},     {"t_select_s", &BenchRecord::t_select_s},
        {"t_interact_s", &BenchRecord::t_interact_s}, {"t_layout_s", &BenchRecord::t_layout_s},
        {"t_contention_s", &BenchRecord::t_contention_s},
    };
    const auto it = columns.find(column);
    if (it == columns.end())
        throw ReportError("unknown timing column '" + std::string(column) + "'");
    return r.*(it->second);
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw ReportError("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double speedup(double t_baseline, double t_row)
{
    if (!(t_baseline > 0.0) || !(t_row > 0.0))
        throw ReportError("speedup needs positive timings");
    return t_baseline / t_row;
}

struct VectorMetrics
{
    double speedup;     // S_v = t_scalar / t_vector
    double efficiency;  // S_v / VL
};

inline VectorMetrics vector_metrics(double t_scalar_loop, double t_vector_loop, unsigned vector_length)
{
    if (vector_length < 1)
        throw ReportError("vector length must be >= 1");
    const double s = speedup(t_scalar_loop, t_vector_loop);
    return {s, s / static_cast<double>(vector_length)};
}

struct SpeedupRow
{
    std::string variant;
    unsigned threads = 1;
    double t_median_s = 0.0;
    double speedup = 0.0;
    // speedup(T)/T against the same variant's one-thread time, when that row exists.
    std::optional<double> efficiency;
};

struct SpeedupReport
{
    std::string baseline_variant;
    unsigned baseline_threads = 1;
    std::vector<SpeedupRow> rows;
    std::optional<VectorMetrics> vector;
};

/// Groups records by (variant, threads), takes the median total time of each
/// group and normalises against the baseline group.
inline SpeedupReport build_report(const std::vector<BenchRecord>& records, const std::string& baseline_variant,
                                  unsigned baseline_threads)
{
    std::map<std::pair<std::string, unsigned>, std::vector<double>> groups;
    std::vector<std::pair<std::string, unsigned>> order;
    for (const BenchRecord& r : records) {
        auto key = std::pair{r.variant, r.threads};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
            order.push_back(key);
        it->second.push_back(r.t_total_s);
    }
    const auto base = groups.find({baseline_variant, baseline_threads});
    if (base == groups.end())
        throw ReportError("baseline " + baseline_variant + " @ " + std::to_string(baseline_threads) +
                          " threads not found in the records");
    const double t_base = median(base->second);

    SpeedupReport report;
    report.baseline_variant = baseline_variant;
    report.baseline_threads = baseline_threads;
    for (const auto& key : order) {
        SpeedupRow row;
        row.variant = key.first;
        row.threads = key.second;
        row.t_median_s = median(groups.at(key));
        row.speedup = speedup(t_base, row.t_median_s);
        if (const auto one = groups.find({key.first, 1u}); one != groups.end())
            row.efficiency = speedup(median(one->second), row.t_median_s) / static_cast<double>(key.second);
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline std::string format_number(double v, int precision = 4)
{
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

inline std::string to_markdown(const SpeedupReport& report)
{
    std::ostringstream os;
    os << "Baseline: " << report.baseline_variant << " @ " << report.baseline_threads << " thread(s)\n\n";
    os << "| variant | threads | t_median_s | speedup | efficiency |\n";
    os << "|---|---:|---:|---:|---:|\n";
    for (const SpeedupRow& r : report.rows)
        os << "| " << r.variant << " | " << r.threads << " | " << format_number(r.t_median_s, 6) << " | "
           << format_number(r.speedup) << " | " << (r.efficiency ? format_number(*r.efficiency) : "-") << " |\n";
    if (report.vector)
        os << "\nS_v = " << format_number(report.vector->speedup)
           << ", epsilon = " << format_number(report.vector->efficiency) << "\n";
    return os.str();
}

inline std::string to_csv(const SpeedupReport& report)
{
    std::ostringstream os;
    os.precision(9);
    os << "variant,threads,t_median_s,speedup,efficiency\n";
    for (const SpeedupRow& r : report.rows) {
        os << r.variant << ',' << r.threads << ',' << r.t_median_s << ',' << r.speedup << ',';
        if (r.efficiency)
            os << *r.efficiency;
        os << '\n';
    }
    if (report.vector)
        os << "# S_v," << report.vector->speedup << ",epsilon," << report.vector->efficiency << '\n';
    return os.str();
}

}  // namespace sphlab
