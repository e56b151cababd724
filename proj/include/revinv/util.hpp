#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace revinv {

/// Round to `decimals` places, ties to even. Used wherever metrics are
/// compared "to two decimals".
double round_half_even(double value, int decimals);

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// Raw 32-byte SHA-256 digest.
void sha256(std::span<const std::uint8_t> bytes, std::span<std::uint8_t, 32> out);

// Deterministic generator with a fully specified output sequence
// (splitmix64 seeding a xoshiro256** core), so seeded runs reproduce across
// standard libraries. std::uniform_int_distribution is implementation-defined
// and is not used anywhere a result must be reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform double in [0, 1).
    double unit();
    bool coin() { return (next() >> 63) != 0; }

private:
    std::uint64_t s_[4];
};

/// Mix two 64-bit values into a derived seed (used for per-run and
/// per-configuration seeds).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Derive a seed from a global seed and an arbitrary key string.
std::uint64_t mix_seed(std::uint64_t a, std::string_view key);

}  // namespace revinv
