#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace nchardy {

/// Seeded generator with pinned distribution mappings, so that a fixed seed
/// yields identical streams on every platform (std:: distributions are
/// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Standard complex normal: real and imaginary parts N(0, 1/2).
    std::complex<double> cnormal() {
        const double s = std::sqrt(0.5);
        return {s * normal(), s * normal()};
    }

    std::uint64_t raw() { return eng_(); }

    /// Derives an independent stream; used for per-trial seeding.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        // splitmix64 over the pair
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nchardy
