#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace semgp {

/// Deterministic random stream. All stochastic choices in the engine go
/// through this wrapper so that a run is reproducible bit-for-bit from its
/// seed regardless of platform or standard-library version (the std::
/// distributions are implementation-defined and are avoided on purpose).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Unbiased draw from [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        // rejection sampling over the top 2^64 - (2^64 mod n) values
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t threshold = (0 - un) % un;
        std::uint64_t x = gen_();
        while (x < threshold) x = gen_();
        return static_cast<std::size_t>(x % un);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace semgp
