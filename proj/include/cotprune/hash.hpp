#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cotprune {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffsetBasis) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

/// Mixes an integer in as eight little-endian bytes.
constexpr std::uint64_t fnv1a64_u64(std::uint64_t value,
                                    std::uint64_t h = kFnvOffsetBasis) {
    for (int i = 0; i < 8; ++i) {
        h ^= static_cast<unsigned char>(value >> (8 * i));
        h *= kFnvPrime;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

} // namespace cotprune
