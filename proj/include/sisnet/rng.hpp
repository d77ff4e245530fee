#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace sis {

using rng_t = std::mt19937_64;
using seed_t = std::uint64_t;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag)
{
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent child seed from a parent seed, a string tag and
/// optional integer indices. Used for per-arm and per-horizon streams.
constexpr seed_t derive_seed(seed_t parent, std::string_view tag,
                             std::initializer_list<std::uint64_t> idx = {})
{
    std::uint64_t h = mix64(parent ^ mix64(hash_tag(tag)));
    for (auto i : idx)
        h = mix64(h ^ mix64(i + 0x632be59bd9b4e019ULL));
    return h;
}

inline rng_t make_rng(seed_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return rng_t(seq);
}

} // namespace sis
