#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sphlab {

inline constexpr std::uint64_t fnv1a_offset_basis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t fnv1a_prime = 0x100000001b3ull;

/// FNV-1a, 64-bit.
constexpr std::uint64_t checksum64(std::span<const std::byte> bytes, std::uint64_t h = fnv1a_offset_basis) noexcept
{
    for (std::byte b : bytes)
        h = (h ^ static_cast<std::uint64_t>(b)) * fnv1a_prime;
    return h;
}

constexpr std::uint64_t checksum64(std::string_view text) noexcept
{
    std::uint64_t h = fnv1a_offset_basis;
    for (char c : text)
        h = (h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c))) * fnv1a_prime;
    return h;
}

/// Digest of a double array as little-endian IEEE-754 bytes, independent of host byte order.
inline std::uint64_t checksum64(std::span<const double> values) noexcept
{
    std::uint64_t h = fnv1a_offset_basis;
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int s = 0; s < 64; s += 8)
            h = (h ^ ((bits >> s) & 0xffu)) * fnv1a_prime;
    }
    return h;
}

}  // namespace sphlab
