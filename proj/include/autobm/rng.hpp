#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace autobm {

// splitmix64 step; used to whiten (seed, stream) pairs into engine seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d9b2b094a8f57ull;
    return z ^ (z >> 31);
}

// Seedable random stream. Distinct (seed, stream) pairs give independent
// sequences; the double conversions avoid std::*_distribution so output is
// identical across standard library implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed;
        splitmix64_next(s);
        s ^= 0xd1b54a32d192ed03ull * (stream + 1);
        engine_.seed(splitmix64_next(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform on [-1, 1); the BSN threshold variable
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    // uniform on (0, 1), both endpoints excluded
    double uniform01_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // exponential with the given mean; strictly positive
    double exponential(double mean) { return -mean * std::log(uniform01_open()); }

    bool bernoulli(double p) { return uniform01() < p; }

    // standard normal via Box-Muller (explicit so output is portable)
    double normal() {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace autobm
