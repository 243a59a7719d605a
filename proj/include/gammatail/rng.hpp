#pragma once

#include <array>
#include <cstdint>

namespace gammatail {

/// 64-bit seed. Identical seeds produce bit-identical variate streams.
struct Seed {
    std::uint64_t value = 0;

    friend constexpr bool operator==(Seed, Seed) = default;
};

/// SplitMix64 finalizer; used for seeding and stream derivation.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives the seed of sub-stream `index` from a master seed.
///
/// The rule is split(master, i) = mix(mix(master) ^ mix(i + golden)), where mix is one
/// SplitMix64 step. It depends only on (master, index), so replication i always sees the
/// same stream no matter which thread runs it or in what order.
[[nodiscard]] constexpr Seed split(Seed master, std::uint64_t index) noexcept {
    std::uint64_t a = master.value;
    std::uint64_t b = index + 0x632BE59BD9B4E019ULL;
    std::uint64_t c = splitmix64(a) ^ splitmix64(b);
    return Seed{splitmix64(c)};
}

/// xoshiro256** generator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit constexpr Rng(Seed seed) noexcept {
        std::uint64_t sm = seed.value;
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); never returns 0.
    constexpr double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal variate (Marsaglia polar method, one value per call).
    double normal() noexcept;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace gammatail
