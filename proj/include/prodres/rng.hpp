#pragma once

#include <cstdint>
#include <string_view>

namespace prodres {

// SplitMix64 finalizer. Bijective on 64-bit words, used both as a stream
// seeder and as the mixing step of derive_seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Absorb one word into a running hash state.
constexpr std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) noexcept {
    return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

// FNV-1a over a label, so string tags can be absorbed like integers.
constexpr std::uint64_t hash_label(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace prodres
