#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace cslab {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used for seed derivation.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Derive a child seed from a parent seed and a sequence of integer keys.
/// Pure function; the same inputs give the same seed on every platform.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> keys);

/// 64-bit FNV-1a of a label, for turning stream names into derive_seed keys.
constexpr std::uint64_t label_key(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64.
/// Satisfies UniformRandomBitGenerator. Normal variates use the Marsaglia
/// polar method so that streams are reproducible across standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound);

    double normal();

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cslab
