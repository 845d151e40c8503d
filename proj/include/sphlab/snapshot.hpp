#pragma once

#include "sphlab/checksum.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sphlab {

// File layout, little-endian throughout:
//   "SPHK" | u32 version | u32 section count
//   per section: u32 name length | name bytes | u64 payload length | payload | u64 FNV-1a of payload

inline constexpr std::string_view snapshot_magic = "SPHK";
inline constexpr std::uint32_t snapshot_version = 1;

struct Section
{
    std::string name;
    std::vector<std::byte> payload;

    friend bool operator==(const Section&, const Section&) = default;
};

using SectionMap = std::vector<Section>;

enum class SnapshotErrc { io, bad_magic, unsupported_version, checksum_mismatch, truncated, malformed };

class SnapshotError : public std::runtime_error
{
public:
    SnapshotError(SnapshotErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    SnapshotErrc code() const noexcept { return code_; }

private:
    SnapshotErrc code_;
};

class ByteWriter
{
public:
    void put_u32(std::uint32_t v) { put_le(v, 4); }
    void put_u64(std::uint64_t v) { put_le(v, 8); }
    void put_i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v), 8); }
    void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
    void put_bytes(std::span<const std::byte> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }
    void put_text(std::string_view s) { put_bytes(std::as_bytes(std::span(s.data(), s.size()))); }

    std::vector<std::byte>& bytes() noexcept { return bytes_; }
    std::vector<std::byte> take() noexcept { return std::move(bytes_); }

private:
    void put_le(std::uint64_t v, int n)
    {
        for (int i = 0; i < n; ++i)
            bytes_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
    }

    std::vector<std::byte> bytes_;
};

class ByteReader
{
public:
    explicit ByteReader(std::span<const std::byte> bytes, std::string context = "snapshot")
        : bytes_(bytes), context_(std::move(context))
    {}

    std::uint32_t get_u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t get_u64() { return get_le(8); }
    std::int64_t get_i64() { return static_cast<std::int64_t>(get_le(8)); }
    double get_f64() { return std::bit_cast<double>(get_le(8)); }

    std::span<const std::byte> get_bytes(std::uint64_t n)
    {
        require(n);
        auto out = bytes_.subspan(pos_, static_cast<std::size_t>(n));
        pos_ += static_cast<std::size_t>(n);
        return out;
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    void require(std::uint64_t n) const
    {
        if (n > remaining())
            throw SnapshotError(SnapshotErrc::truncated, context_ + ": truncated (needed " + std::to_string(n) +
                                                             " bytes, " + std::to_string(remaining()) + " left)");
    }

    std::uint64_t get_le(int n)
    {
        require(static_cast<std::uint64_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::byte> bytes_;
    std::size_t pos_ = 0;
    std::string context_;
};

inline std::vector<std::byte> encode_snapshot(const SectionMap& sections)
{
    ByteWriter w;
    w.put_text(snapshot_magic);
    w.put_u32(snapshot_version);
    w.put_u32(static_cast<std::uint32_t>(sections.size()));
    for (const Section& s : sections) {
        w.put_u32(static_cast<std::uint32_t>(s.name.size()));
        w.put_text(s.name);
        w.put_u64(s.payload.size());
        w.put_bytes(s.payload);
        w.put_u64(checksum64(s.payload));
    }
    return w.take();
}

/// Parses and verifies every section before returning anything.
inline SectionMap decode_snapshot(std::span<const std::byte> bytes, const std::string& context = "snapshot")
{
    ByteReader r(bytes, context);
    const auto magic = r.get_bytes(snapshot_magic.size());
    if (std::memcmp(magic.data(), snapshot_magic.data(), snapshot_magic.size()) != 0)
        throw SnapshotError(SnapshotErrc::bad_magic, context + ": not an SPHK snapshot (bad magic)");
    const std::uint32_t version = r.get_u32();
    if (version != snapshot_version)
        throw SnapshotError(SnapshotErrc::unsupported_version,
                            context + ": unsupported snapshot version " + std::to_string(version));
    const std::uint32_t count = r.get_u32();

    SectionMap sections;
    for (std::uint32_t k = 0; k < count; ++k) {
        Section s;
        const std::uint32_t name_len = r.get_u32();
        const auto name = r.get_bytes(name_len);
        s.name.assign(reinterpret_cast<const char*>(name.data()), name.size());
        const std::uint64_t len = r.get_u64();
        const auto payload = r.get_bytes(len);
        s.payload.assign(payload.begin(), payload.end());
        const std::uint64_t stored = r.get_u64();
        if (stored != checksum64(s.payload))
            throw SnapshotError(SnapshotErrc::checksum_mismatch,
                                context + ": checksum mismatch in section '" + s.name + "'");
        sections.push_back(std::move(s));
    }
    return sections;
}

inline void dump(const std::filesystem::path& path, const SectionMap& sections)
{
    const auto bytes = encode_snapshot(sections);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw SnapshotError(SnapshotErrc::io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw SnapshotError(SnapshotErrc::io, "write to '" + path.string() + "' failed");
}

inline SectionMap load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SnapshotError(SnapshotErrc::io, "cannot open '" + path.string() + "' for reading");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw SnapshotError(SnapshotErrc::io, "read from '" + path.string() + "' failed");
    return decode_snapshot(std::as_bytes(std::span(raw)), path.string());
}

inline const Section* find_section(const SectionMap& sections, std::string_view name) noexcept
{
    for (const Section& s : sections)
        if (s.name == name)
            return &s;
    return nullptr;
}

}  // namespace sphlab
