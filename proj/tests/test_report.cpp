#include "sphlab/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace sphlab;

namespace {

BenchRecord row(std::string variant, unsigned threads, double t)
{
    BenchRecord r;
    r.variant = std::move(variant);
    r.threads = threads;
    r.t_total_s = t;
    r.checksum = 0xabcdef;
    return r;
}

}  // namespace

TEST(Report, VectorMetricsFixtures)
{
    const VectorMetrics ivb = vector_metrics(2.2, 1.0, 4);
    EXPECT_EQ(ivb.speedup, 2.2);
    EXPECT_EQ(ivb.efficiency, 0.55);
    const VectorMetrics knc = vector_metrics(3.4, 1.0, 8);
    EXPECT_EQ(knc.speedup, 3.4);
    EXPECT_EQ(knc.efficiency, 0.425);
    EXPECT_THROW(vector_metrics(1.0, 0.0, 4), ReportError);
    EXPECT_THROW(vector_metrics(1.0, 1.0, 0), ReportError);
}

TEST(Report, BaselineRowHasUnitSpeedup)
{
    const auto rep = build_report({row("original", 1, 4.0), row("original", 1, 5.0), row("original", 1, 6.0)},
                                  "original", 1);
    ASSERT_EQ(rep.rows.size(), 1u);
    EXPECT_EQ(rep.rows[0].speedup, 1.0);
    EXPECT_EQ(rep.rows[0].t_median_s, 5.0);
    EXPECT_EQ(rep.rows[0].efficiency, 1.0);
}

TEST(Report, SpeedupAndEfficiency)
{
    const auto rep = build_report(
        {row("original", 1, 8.0), row("lockless", 1, 6.0), row("lockless", 4, 2.0), row("optimised", 8, 1.0)},
        "original", 1);
    ASSERT_EQ(rep.rows.size(), 4u);
    EXPECT_EQ(rep.rows[1].speedup, 8.0 / 6.0);
    EXPECT_EQ(rep.rows[2].speedup, 4.0);
    EXPECT_EQ(rep.rows[2].efficiency, 0.75);
    // No one-thread row for optimised.
    EXPECT_FALSE(rep.rows[3].efficiency.has_value());
    EXPECT_NE(to_markdown(rep).find("| lockless | 4 |"), std::string::npos);
}

TEST(Report, MissingBaselineIsAnError)
{
    EXPECT_THROW(build_report({row("soa", 2, 1.0)}, "original", 1), ReportError);
}

TEST(Report, CsvSchemaAndParse)
{
    EXPECT_EQ(bench_csv_header, "variant,threads,n_particles,k,repeat,iterations,t_total_s,t_tree_s,t_search_s,"
                                "t_select_s,t_interact_s,t_layout_s,t_contention_s,checksum_hex");
    BenchRecord r = row("vectorised", 8, 1.25);
    r.n_particles = 32768;
    r.k = 295;
    r.repeat = 2;
    r.iterations = 7;
    r.t_interact_s = 0.5;
    r.checksum = 0xfedcba9876543210ull;
    const std::string line = to_csv_row(r);
    EXPECT_EQ(line.substr(line.size() - 16), "fedcba9876543210");

    std::istringstream in(std::string(bench_csv_header) + "\n" + line + "\n\n");
    const auto back = read_bench_csv(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].variant, "vectorised");
    EXPECT_EQ(back[0].threads, 8u);
    EXPECT_EQ(back[0].n_particles, 32768u);
    EXPECT_EQ(back[0].iterations, 7u);
    EXPECT_EQ(back[0].t_total_s, 1.25);
    EXPECT_EQ(column_value(back[0], "t_interact_s"), 0.5);
    EXPECT_EQ(back[0].checksum, r.checksum);
    EXPECT_THROW(column_value(back[0], "t_nope"), ReportError);
    EXPECT_THROW(parse_csv_row("a,b,c"), ReportError);
    EXPECT_THROW(parse_csv_row("v,x,1,1,1,1,1,1,1,1,1,1,1,ff"), ReportError);
}
