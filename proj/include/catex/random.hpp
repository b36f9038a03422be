#pragma once

#include <cstdint>
#include <vector>

namespace catex {

/// Small deterministic generator (splitmix64). Used wherever reproducibility
/// across platforms and standard-library versions matters: split shuffling,
/// synthetic noise, fold assignment.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

    /// Uniform double in [0, 1).
    double next_unit() { return (next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Mixes a seed with a stream index so derived generators are independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 rng(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    return rng.next();
}

/// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void deterministic_shuffle(std::vector<T>& values, SplitMix64& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[rng.next_below(i)]);
}

} // namespace catex
