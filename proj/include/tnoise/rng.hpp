#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace tnoise {

// Recorded in run metadata. Box-Muller is done by hand because
// std::normal_distribution is implementation defined.
inline constexpr const char* rng_algorithm_id = "mt19937_64+splitmix64-seeding+box-muller";

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Independent stream for (seed, stream index), e.g. one per Monte-Carlo sample.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xd1b54a32d192ed03ull + 1));
}

class Rng
{
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : eng_(stream_seed(seed, stream)) {}

    /// uniform in [0, 1)
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();   // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0;
};

} // namespace tnoise
