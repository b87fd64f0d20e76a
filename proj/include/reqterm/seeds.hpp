#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace reqterm {

// FNV-1a 64-bit over raw bytes. Used for seed derivation and content hashes
// in report provenance; not cryptographic.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64 finalizer; decorrelates nearby inputs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Per-run seeds come from a master seed and a textual tag, e.g.
// derive_seed(master, "expi|docA|k=15"). Deterministic and documented so the
// whole experiment protocol can be replayed from one number.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    return splitmix64(master ^ fnv1a64(tag));
}

std::string hash_hex(std::string_view bytes);

}  // namespace reqterm
