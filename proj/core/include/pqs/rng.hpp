#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pqs {

// splitmix64; used to derive independent per-realization seeds from a root
// seed so serial and parallel ensemble runs draw identical streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root ^ (0x5851f42d4c957f2dULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// Random stream with samplers written against the uniform draw only, so the
// sequence of variates is fixed by the seed (standard-library distribution
// objects are implementation-defined and would not be portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform() {
        return std::generate_canonical<double, 53>(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Inversion by unconditional search is wasteful for large means; the
    // product method is exact and cheap for the small means used here.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double threshold = std::exp(-mean);
        long k = 0;
        double prod = uniform();
        while (prod > threshold) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    // Exponential waiting time with the given rate (events per unit time).
    double exponential(double rate) {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return -std::log(u) / rate;
    }

    // Geometric occupation law p(n) = (1 - r) r^n for n >= 0.
    long geometric(double ratio) {
        if (ratio <= 0.0) return 0;
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return static_cast<long>(std::floor(std::log(u) / std::log(ratio)));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace pqs
