#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace wfsim {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from a root seed and a path of counters.
/// Same (root, path) always gives the same seed, so work can be split across
/// threads in any order.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = mix64(root);
    for (std::uint64_t c : path) {
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Counter-based generator (splitmix64 sequence). Cheap to construct per cell,
/// usable with the standard <random> distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

} // namespace wfsim
