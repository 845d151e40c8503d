#include "sphlab/checksum.hpp"
#include "sphlab/snapshot.hpp"
#include "sphlab/workload_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace sphlab;

namespace {

class SnapshotFiles : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = std::filesystem::temp_directory_path() /
               ("sphlab_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::filesystem::path file(const char* name) const { return dir_ / name; }

    static std::vector<char> read_all(const std::filesystem::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
    static void write_all(const std::filesystem::path& p, const std::vector<char>& bytes)
    {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }

    std::filesystem::path dir_;
};

std::vector<std::byte> bytes_of(std::string_view s)
{
    const auto b = std::as_bytes(std::span(s.data(), s.size()));
    return {b.begin(), b.end()};
}

SnapshotErrc error_code_of(const std::filesystem::path& p)
{
    try {
        load(p);
    } catch (const SnapshotError& e) {
        return e.code();
    }
    ADD_FAILURE() << "load succeeded";
    return SnapshotErrc::io;
}

}  // namespace

TEST(Checksum, Fnv1aVectors)
{
    EXPECT_EQ(checksum64(std::span<const std::byte>{}), 0xcbf29ce484222325ull);
    EXPECT_EQ(checksum64("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(checksum64("foobar"), 0x85944171f73967e8ull);
    EXPECT_NE(checksum64("ab"), checksum64("ba"));
    EXPECT_EQ(checksum64(bytes_of("ab")), checksum64("ab"));
}

TEST(Checksum, DoublesHashAsLittleEndianBytes)
{
    const double v[] = {1.0};
    // 1.0 = 0x3FF0000000000000, little-endian bytes 00 .. 00 F0 3F.
    const std::byte le[] = {std::byte{0}, std::byte{0}, std::byte{0}, std::byte{0},
                            std::byte{0}, std::byte{0}, std::byte{0xF0}, std::byte{0x3F}};
    EXPECT_EQ(checksum64(std::span<const double>(v)), checksum64(std::span<const std::byte>(le)));
}

TEST_F(SnapshotFiles, EmptySectionMap)
{
    dump(file("empty.sphk"), {});
    EXPECT_TRUE(load(file("empty.sphk")).empty());
    const auto raw = read_all(file("empty.sphk"));
    // magic + version + count
    const std::vector<char> expect{'S', 'P', 'H', 'K', 1, 0, 0, 0, 0, 0, 0, 0};
    EXPECT_EQ(raw, expect);
}

TEST_F(SnapshotFiles, ExactLayout)
{
    dump(file("one.sphk"), {{"ab", bytes_of("xyz")}});
    const auto raw = read_all(file("one.sphk"));
    ASSERT_EQ(raw.size(), 12u + 4 + 2 + 8 + 3 + 8);
    EXPECT_EQ(raw[8], 1);    // section count
    EXPECT_EQ(raw[12], 2);   // name length
    EXPECT_EQ(raw[16], 'a');
    EXPECT_EQ(raw[18], 3);   // payload length
    EXPECT_EQ(raw[26], 'x');
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i)
        stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[29 + i])) << (8 * i);
    EXPECT_EQ(stored, checksum64("xyz"));
}

TEST_F(SnapshotFiles, WorkloadRoundTrip)
{
    WorkloadSpec spec;
    spec.kind = WorkloadKind::gaussian_blobs;
    spec.n_particles = 10'000;
    spec.seed = 17;
    spec.k_neighbors = 40;
    const ParticleAoS p = generate(spec);
    save_workload(file("w.sphk"), spec, p);
    const Workload w = load_workload(file("w.sphk"));
    EXPECT_EQ(w.spec.kind, spec.kind);
    EXPECT_EQ(w.spec.n_particles, spec.n_particles);
    EXPECT_EQ(w.spec.seed, spec.seed);
    EXPECT_EQ(w.spec.k_neighbors, 40u);
    ASSERT_EQ(w.particles.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        ASSERT_EQ(w.particles[i].id, p[i].id);
        ASSERT_EQ(w.particles[i].position, p[i].position);
        ASSERT_EQ(w.particles[i].mass, p[i].mass);
        ASSERT_EQ(w.particles[i].smoothing_length, p[i].smoothing_length);
        ASSERT_EQ(w.particles[i].needs_recompute, p[i].needs_recompute);
    }
    // Re-encoding the loaded data reproduces the file byte for byte.
    save_workload(file("w2.sphk"), w.spec, w.particles);
    EXPECT_EQ(read_all(file("w.sphk")), read_all(file("w2.sphk")));
}

TEST_F(SnapshotFiles, SectionOrderPreserved)
{
    const SectionMap in{{"zeta", bytes_of("1")}, {"alpha", bytes_of("")}, {"mid", bytes_of("22")}};
    dump(file("o.sphk"), in);
    EXPECT_EQ(load(file("o.sphk")), in);
}

TEST_F(SnapshotFiles, FlippedPayloadByteNamesTheSection)
{
    dump(file("c.sphk"), {{"first", bytes_of("hello")}, {"second", bytes_of("world")}});
    auto raw = read_all(file("c.sphk"));
    // second payload starts after: header 12, first section 4+5+8+5+8, then 4+6+8.
    raw[12 + 30 + 18] ^= 0x01;
    write_all(file("c.sphk"), raw);
    try {
        load(file("c.sphk"));
        FAIL();
    } catch (const SnapshotError& e) {
        EXPECT_EQ(e.code(), SnapshotErrc::checksum_mismatch);
        EXPECT_NE(std::string(e.what()).find("'second'"), std::string::npos);
    }
}

TEST_F(SnapshotFiles, DistinctErrors)
{
    dump(file("t.sphk"), {{"particles", std::vector<std::byte>(100, std::byte{7})}});
    const auto raw = read_all(file("t.sphk"));

    write_all(file("trunc.sphk"), {raw.begin(), raw.begin() + 60});
    EXPECT_EQ(error_code_of(file("trunc.sphk")), SnapshotErrc::truncated);

    auto bumped = raw;
    bumped[4] = 2;
    write_all(file("ver.sphk"), bumped);
    EXPECT_EQ(error_code_of(file("ver.sphk")), SnapshotErrc::unsupported_version);

    auto magic = raw;
    magic[0] = 'X';
    write_all(file("magic.sphk"), magic);
    EXPECT_EQ(error_code_of(file("magic.sphk")), SnapshotErrc::bad_magic);

    EXPECT_EQ(error_code_of(file("missing.sphk")), SnapshotErrc::io);
    EXPECT_THROW(dump(dir_ / "no" / "such" / "dir.sphk", {}), SnapshotError);
}

TEST_F(SnapshotFiles, ResultsRoundTrip)
{
    DensityResults r{{1.0, 2.5, 1e-300}, {0.1, 0.2, 0.3}};
    save_results(file("r.sphk"), r, {{"variant", "optimised"}});
    const DensityResults back = load_results(file("r.sphk"));
    EXPECT_EQ(back.densities, r.densities);
    EXPECT_EQ(back.smoothing_lengths, r.smoothing_lengths);
    EXPECT_THROW(load_results(file("missing.sphk")), SnapshotError);
}

TEST(SnapshotCodec, MalformedParticlePayload)
{
    ByteWriter w;
    w.put_u64(1'000'000'000'000ull);
    EXPECT_THROW(decode_particles(w.bytes()), SnapshotError);
}
