#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace gdsl {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a, 64-bit. Used for dataset/spec fingerprints and for deriving
// per-subsystem RNG substreams. Stable across platforms.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64(std::uint64_t value, std::uint64_t h = kFnvOffset) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

// splitmix64 finalizer; decorrelates seeds built from structured inputs.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

} // namespace gdsl
